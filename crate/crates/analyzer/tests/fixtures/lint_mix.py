"""Fixture with two convention, one refactor and one warning finding."""


def Compute(alpha, beta, gamma, delta, epsilon, zeta):
    """Combine six inputs."""
    Total = alpha + beta + gamma
    scratch = delta * epsilon
    return Total * zeta
