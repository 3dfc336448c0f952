def run(n):
    raise ValueError(f"cannot handle {n}")
