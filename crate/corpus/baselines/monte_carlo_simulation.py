"""Monte Carlo estimate of pi."""
import random


def monte_carlo_pi(samples, seed):
    """Estimate pi from ``samples`` uniform points in the unit square."""
    if samples <= 0:
        return 0.0
    rng = random.Random(seed)
    inside = 0
    for _ in range(samples):
        x = rng.random()
        y = rng.random()
        if x * x + y * y <= 1.0:
            inside += 1
    return 4.0 * inside / samples
