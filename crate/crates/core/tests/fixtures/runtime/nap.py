import time


def run(n):
    time.sleep(0.15 * n)
    return n
