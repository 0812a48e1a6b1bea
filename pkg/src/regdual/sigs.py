"""Signature tags for the four predual base-category pairs.

Algebra-side (C) tags pair with monoid-side (D) tags by a fixed table:
boolean algebras with sets, bounded distributive lattices with posets,
semilattices with semilattices, Z2 vector spaces with themselves.
"""

from .errors import InputError

SET = "SET"
POS = "POS"
SLAT = "SLAT"
Z2VEC = "Z2VEC"
DSIGS = (SET, POS, SLAT, Z2VEC)

BA = "BA"
DLAT = "DLAT"
SLAT_C = "SLAT_C"
Z2VEC_C = "Z2VEC_C"
CSIGS = (BA, DLAT, SLAT_C, Z2VEC_C)

CSIG_TO_DSIG = {BA: SET, DLAT: POS, SLAT_C: SLAT, Z2VEC_C: Z2VEC}
DSIG_TO_CSIG = {d: c for c, d in CSIG_TO_DSIG.items()}

# Payload kinds for elements of the free D-monoid: a single word, or a
# normalized finite set of words (plain for SLAT, mod-2 for Z2VEC).
WORD_DSIGS = (SET, POS)
SETLIKE_DSIGS = (SLAT, Z2VEC)


def check_dsig(dsig):
    if dsig not in DSIGS:
        raise InputError(f"unknown D-signature {dsig!r}")
    return dsig


def check_csig(csig):
    if csig not in CSIGS:
        raise InputError(f"unknown C-signature {csig!r}")
    return csig
