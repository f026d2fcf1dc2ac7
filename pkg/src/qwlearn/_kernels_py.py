"""Pure-numpy walk evolution kernels.

Fallback used when the compiled extension is unavailable.  Complex products
are decomposed into explicitly ordered real multiplies and adds (numpy's
native complex kernels may fuse multiply-adds, the compiled twin must not),
so both backends produce bit-identical amplitudes.
"""

import numpy as np

from .errors import OutOfBoundsError

COMPILED = False


def _boundary_error(step):
    return OutOfBoundsError(
        f"amplitude reached the lattice boundary at step {step}; "
        "the state was under-allocated for this walk"
    )


def _parts(amps):
    u, d = amps
    return (
        np.ascontiguousarray(u.real),
        np.ascontiguousarray(u.imag),
        np.ascontiguousarray(d.real),
        np.ascontiguousarray(d.imag),
    )


def _merge(amps, ur, ui, dr, di):
    amps[0].real = ur
    amps[0].imag = ui
    amps[1].real = dr
    amps[1].imag = di


def _cmul_re(cr, ci, xr, xi):
    return cr * xr - ci * xi


def _cmul_im(cr, ci, xr, xi):
    return cr * xi + ci * xr


def _coin_parts(coin):
    return tuple(float(v) for e in np.asarray(coin).ravel() for v in (e.real, e.imag))


def evolve_standard(amps, coin, steps, record=None):
    """Apply `steps` coin-then-shift steps in place on a (2, L) state.

    When `record` is a (steps, L) float64 array, row k receives the position
    probabilities after step k+1.
    """
    r00, i00, r01, i01, r10, i10, r11, i11 = _coin_parts(coin)
    ur, ui, dr, di = _parts(amps)
    for step in range(steps):
        # amplitudes that the shift would carry off the lattice
        exl_r = _cmul_re(r00, i00, ur[0], ui[0]) + _cmul_re(r01, i01, dr[0], di[0])
        exl_i = _cmul_im(r00, i00, ur[0], ui[0]) + _cmul_im(r01, i01, dr[0], di[0])
        exr_r = _cmul_re(r10, i10, ur[-1], ui[-1]) + _cmul_re(r11, i11, dr[-1], di[-1])
        exr_i = _cmul_im(r10, i10, ur[-1], ui[-1]) + _cmul_im(r11, i11, dr[-1], di[-1])
        if exl_r != 0 or exl_i != 0 or exr_r != 0 or exr_i != 0:
            raise _boundary_error(step)
        nur = np.empty_like(ur)
        nui = np.empty_like(ui)
        ndr = np.empty_like(dr)
        ndi = np.empty_like(di)
        nur[:-1] = _cmul_re(r00, i00, ur[1:], ui[1:]) + _cmul_re(r01, i01, dr[1:], di[1:])
        nui[:-1] = _cmul_im(r00, i00, ur[1:], ui[1:]) + _cmul_im(r01, i01, dr[1:], di[1:])
        nur[-1] = 0.0
        nui[-1] = 0.0
        ndr[1:] = _cmul_re(r10, i10, ur[:-1], ui[:-1]) + _cmul_re(r11, i11, dr[:-1], di[:-1])
        ndi[1:] = _cmul_im(r10, i10, ur[:-1], ui[:-1]) + _cmul_im(r11, i11, dr[:-1], di[:-1])
        ndr[0] = 0.0
        ndi[0] = 0.0
        ur, ui, dr, di = nur, nui, ndr, ndi
        if record is not None:
            record[step] = (ur * ur + ui * ui) + (dr * dr + di * di)
    _merge(amps, ur, ui, dr, di)


def evolve_split(amps, coin1, coin2, steps, record=None):
    """Split-step evolution: coin1, up-shift left, coin2, down-shift right."""
    a00r, a00i, a01r, a01i, a10r, a10i, a11r, a11i = _coin_parts(coin1)
    b00r, b00i, b01r, b01i, b10r, b10i, b11r, b11i = _coin_parts(coin2)
    ur, ui, dr, di = _parts(amps)
    for step in range(steps):
        cur = _cmul_re(a00r, a00i, ur, ui) + _cmul_re(a01r, a01i, dr, di)
        cui = _cmul_im(a00r, a00i, ur, ui) + _cmul_im(a01r, a01i, dr, di)
        cdr = _cmul_re(a10r, a10i, ur, ui) + _cmul_re(a11r, a11i, dr, di)
        cdi = _cmul_im(a10r, a10i, ur, ui) + _cmul_im(a11r, a11i, dr, di)
        # left exit: coined up at site 0; right exit: coined-twice down at the edge
        exr_r = _cmul_re(b11r, b11i, cdr[-1], cdi[-1])
        exr_i = _cmul_im(b11r, b11i, cdr[-1], cdi[-1])
        if cur[0] != 0 or cui[0] != 0 or exr_r != 0 or exr_i != 0:
            raise _boundary_error(step)
        nur = np.empty_like(ur)
        nui = np.empty_like(ui)
        ndr = np.empty_like(dr)
        ndi = np.empty_like(di)
        nur[:-1] = _cmul_re(b00r, b00i, cur[1:], cui[1:]) + _cmul_re(b01r, b01i, cdr[:-1], cdi[:-1])
        nui[:-1] = _cmul_im(b00r, b00i, cur[1:], cui[1:]) + _cmul_im(b01r, b01i, cdr[:-1], cdi[:-1])
        nur[-1] = _cmul_re(b01r, b01i, cdr[-1], cdi[-1])
        nui[-1] = _cmul_im(b01r, b01i, cdr[-1], cdi[-1])
        ndr[1:] = _cmul_re(b10r, b10i, cur[1:], cui[1:]) + _cmul_re(b11r, b11i, cdr[:-1], cdi[:-1])
        ndi[1:] = _cmul_im(b10r, b10i, cur[1:], cui[1:]) + _cmul_im(b11r, b11i, cdr[:-1], cdi[:-1])
        ndr[0] = 0.0
        ndi[0] = 0.0
        ur, ui, dr, di = nur, nui, ndr, ndi
        if record is not None:
            record[step] = (ur * ur + ui * ui) + (dr * dr + di * di)
    _merge(amps, ur, ui, dr, di)
