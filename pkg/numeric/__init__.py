from numeric.linalg import (
    fix_row_signs,
    frobenius,
    in_canonical_set,
    leading_sign,
    nullspace,
    rank,
    right_pinv,
    sym_eig,
)

__all__ = [
    "fix_row_signs",
    "frobenius",
    "in_canonical_set",
    "leading_sign",
    "nullspace",
    "rank",
    "right_pinv",
    "sym_eig",
]
