import os

# helper
def f(x):
    y = x + 1
    return y

# main
z = f(2)
print(z, os.sep)
