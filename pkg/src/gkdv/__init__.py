"""Lie symmetries, reductions and solitary waves of u_t = f(u) u_x + u_xxx."""
