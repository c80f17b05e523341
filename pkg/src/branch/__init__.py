"""Minimal-branch solvers, continuation to the fold and branch reports.

Modules:
    models: BranchPoint, ContinuationResult, solver signals, pydantic reports
    solvers: monotone_solve(), monotone_solve_from(), newton_solve()
    continuation: continue_branch(), extrapolate_u_star()
    reports: extremal_report(), extinction_check(), h02_norm_bound_check()
"""
