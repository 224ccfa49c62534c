"""Regression families with independently known invariant-cone structure."""

import numpy as np

# 3x3 pair with mixed signs whose minimal cone has exactly four extreme rays
MIXED_SIGN_PAIR = (
    np.array([[0.0, 1.0, 1.0], [0.0, 1.0, 1.0], [-1.0, 1.0, 0.0]]),
    np.array([[-1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 0.0]]),
)

# the four extreme rays of MIXED_SIGN_PAIR's minimal cone
MIXED_SIGN_RAYS = (
    np.array([1.0, 1.0, 1.0]),
    np.array([1.0, 1.0, 0.0]),
    np.array([-1.0, 2.0, 1.0]),
    np.array([-1.0, 1.0, 1.0]),
)

# base points of an invariant conic polytope over the minimal cone above
MIXED_SIGN_BASE_POINTS = (
    np.array([1.0, 1.0, 0.0]),
    np.array([-1.0, 1.0, 1.0]),
    np.array([2.0, 2.0, 2.0]),
    np.array([-2.0, 4.0, 2.0]),
)

# block-triangular pair: one expansive upper block, one rotation-scaling;
# the plain growth never terminates on it, and its minimal cone has sixteen
# extreme rays (two interleaved octagonal families in cross-section)
SPIRAL_PAIR = (
    np.array([[2.0, 3.0, 6.0], [4.0, 1.0, 8.0], [0.0, 0.0, 14.0]]),
    np.array([[-1.0, -1.0, 0.0], [1.0, -1.0, 0.0], [0.0, 0.0, 1.4142135623730951]]),
)

# 0/1 pair whose minimal cone is generated by a single eigenvector cycle of
# length ten (plus its images)
BOOLEAN_LONG_ROOT_PAIR = (
    np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [1.0, 0.0, 1.0]]),
    np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]),
)
BOOLEAN_LONG_ROOT_CLASS = (1, 1, 2, 2, 1, 2, 2, 1, 2, 2)

# 0/1 pair whose boundary carries seven distinct eigenvector cycles
BOOLEAN_SEVEN_TREE_PAIR = (
    np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
    np.array([[1.0, 1.0, 1.0], [1.0, 0.0, 1.0], [0.0, 0.0, 0.0]]),
)
BOOLEAN_SEVEN_TREE_CLASSES = (
    (1,),
    (2,),
    (1, 2),
    (1, 1, 2),
    (1, 2, 2),
    (1, 1, 1, 2),
    (1, 1, 2, 2),
)

# 2x2 Gaussian pair with a certified obtuse primal/dual pairing (no cone)
NO_CONE_PAIR_2D = (
    np.array([[-0.22363893, -0.70169081], [-1.79571318, 0.81832562]]),
    np.array([[-5.71032902e-01, 7.85525063e-04], [-1.06364272e00, 1.30171450e00]]),
)
