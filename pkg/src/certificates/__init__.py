"""Closed-form bounds on lambda* and discrete certificate checks.

Modules:
    models: CertificateSpec, CertificateReport, CertificateKind, Verdict
    bounds: lower_bound(), upper_bound(), omega_alpha_bound(), singular_profile()
    checks: check_omega_alpha(), check_g_beta(), check_singularity_certificate(),
        check_singular_profile(), upper_bound_check(), testing_identity()
"""
