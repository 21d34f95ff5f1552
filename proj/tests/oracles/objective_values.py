"""Reference values for the built-in objectives, computed with numpy in
extended precision, frozen into test_objective.cpp."""
import numpy as np

def sphere(x): return np.sum(x * x)
def bent_cigar(x): return x[0] ** 2 + 1e6 * np.sum(x[1:] ** 2)
def elliptic(x):
    d = len(x); i = np.arange(d, dtype=np.longdouble)
    return np.sum(np.power(np.longdouble(1e6), i / (d - 1)) * x * x)
def hgbat(x):
    s2 = np.sum(x * x); s = np.sum(x); d = len(x)
    return np.sqrt(abs(s2 * s2 - s * s)) + (0.5 * s2 + s) / d + 0.5
def rosenbrock(x): return np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1) ** 2)
def griewank(x):
    i = np.arange(1, len(x) + 1, dtype=np.longdouble)
    return 1 + np.sum(x * x) / 4000 - np.prod(np.cos(x / np.sqrt(i)))

vecs = {
    "a": [1.5, -2.25, 3.0, 0.5],
    "b": [-40.0, 12.5, 99.0, -7.75, 0.125],
}
for name, v in vecs.items():
    x = np.array(v, dtype=np.longdouble)
    for f in (sphere, bent_cigar, elliptic, hgbat, rosenbrock, griewank):
        print(name, f.__name__, repr(float(f(x))))
