import math

from salaser.model import ActiveMedium, CavityField, Injection, LaserSystem, PassiveMedium


def build(kappa, beta, beta_p, A, Ap, *, s=0.0, fast=None, slow=None, n_in=0.0, phi_in=0.0):
    """LaserSystem with prescribed derived constants and well-separated medium rates."""
    fast = 1e4 * kappa if fast is None else fast
    slow = 1e2 * kappa if slow is None else slow
    g = math.sqrt(beta * fast * slow / 4)
    gp = math.sqrt(beta_p * fast * slow / 4)
    inj = Injection(n_in, phi_in) if n_in > 0 else None
    return LaserSystem(ActiveMedium(fast, slow, g, A / beta, s),
                       PassiveMedium(slow, fast, gp, Ap / beta_p), CavityField(kappa, inj))
