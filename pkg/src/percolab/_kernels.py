"""Compiled Monte Carlo kernels.

Each kernel mirrors a pure-Python reference implementation elsewhere in
the package (exploration walks, crossing detection, interface-strand
tracing, Loewner steps); the equivalence is enforced by tests.  Sample i
of a kernel run uses a seed derived outside, so results are independent
of thread count and scheduling.
"""

import numpy as np
from numba import njit, prange

U64 = np.uint64
_G = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _mix64(x):
    z = x + _G
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _site_bit(seed, q, r):
    h = _mix64(seed)
    h = _mix64(h ^ U64(np.int64(q)))
    h = _mix64(h ^ U64(np.int64(r)))
    return h >> U64(63)


@njit(cache=True)
def site_colors(seed, qs, rs):
    """+1/-1 colors for the given site arrays (matches rng.site_color)."""
    n = qs.shape[0]
    out = np.empty(n, dtype=np.int8)
    s = U64(seed)
    for i in range(n):
        out[i] = 1 if _site_bit(s, qs[i], rs[i]) else -1
    return out


# ---------------------------------------------------------------------------
# exploration walk
# ---------------------------------------------------------------------------
# Cell state grid codes: 0 outside, 1 interior, 2 right arc (blue),
# 3 left arc (yellow).  Color grid codes: 0 unknown, 1 blue, 2 yellow.
# Walk status codes: 0 reached b, 1 hit target, 2 budget exceeded,
# 3 illegal cell.


@njit(cache=True, inline="always")
def _hexes_at_vertex(u, v):
    m = v % 3
    if m < 0:
        m += 3
    if m == 2:
        r0 = (v - 2) // 3
        q0 = (u - r0) // 2
        return q0, r0, q0, r0 + 1, q0 - 1, r0 + 1
    r0 = (v + 2) // 3
    q0 = (u - r0) // 2
    return q0, r0, q0, r0 - 1, q0 + 1, r0 - 1


@njit(cache=True, inline="always")
def _is_corner_of(u, v, q, r):
    du = u - (2 * q + r)
    dv = v - 3 * r
    if du == 0:
        return dv == 2 or dv == -2
    if du == 1 or du == -1:
        return dv == 1 or dv == -1
    return False


@njit(cache=True)
def walk(state, colors, q0, r0, tu, tv, hu, hv, bu, bv,
         seed, lazy, budget, mode, flags, fu0, fv0,
         ccx, ccy, crad, mesh, path, touched):
    """One exploration walk; see module header for codes.

    path receives the vertex sequence (unit coords); touched receives the
    (grid) indices of colored cells so the caller can reset the color grid.
    Returns (status, path_len, ntouched, last_u, last_v).
    """
    sq3 = 1.7320508075688772
    n_path = 0
    path[n_path, 0] = tu
    path[n_path, 1] = tv
    n_path += 1
    path[n_path, 0] = hu
    path[n_path, 1] = hv
    n_path += 1
    ntouch = 0
    steps = 0
    s = U64(seed)
    while True:
        if mode == 1:
            fi = hu - fu0
            fj = hv - fv0
            if 0 <= fi < flags.shape[0] and 0 <= fj < flags.shape[1] and flags[fi, fj]:
                return 1, n_path, ntouch, hu, hv
        elif mode == 2:
            px = 0.5 * sq3 * mesh * hu - ccx
            py = 0.5 * mesh * hv - ccy
            if px * px + py * py >= crad * crad:
                return 1, n_path, ntouch, hu, hv
        if hu == bu and hv == bv:
            if mode == 0:
                return 0, n_path, ntouch, hu, hv
            return 3, n_path, ntouch, hu, hv
        # front hexagon: the one at the head not containing the tail vertex
        q1, r1, q2, r2, q3, r3 = _hexes_at_vertex(hu, hv)
        fq = q1
        fr = r1
        if _is_corner_of(tu, tv, q1, r1):
            if _is_corner_of(tu, tv, q2, r2):
                fq = q3
                fr = r3
            else:
                fq = q2
                fr = r2
        st = state[fq - q0, fr - r0]
        if st == 1:
            c = colors[fq - q0, fr - r0]
            if c == 0:
                if lazy:
                    c = 1 if _site_bit(s, fq, fr) else 2
                    colors[fq - q0, fr - r0] = c
                    touched[ntouch, 0] = fq - q0
                    touched[ntouch, 1] = fr - r0
                    ntouch += 1
                else:
                    return 3, n_path, ntouch, hu, hv
        elif st == 2:
            c = 1
        elif st == 3:
            c = 2
        else:
            return 3, n_path, ntouch, hu, hv
        # candidate continuations: head's neighbors minus the tail
        m = hv % 3
        if m < 0:
            m += 3
        if m == 2:
            n1u, n1v = hu, hv + 2
            n2u, n2v = hu + 1, hv - 1
            n3u, n3v = hu - 1, hv - 1
        else:
            n1u, n1v = hu, hv - 2
            n2u, n2v = hu + 1, hv + 1
            n3u, n3v = hu - 1, hv + 1
        if n1u == tu and n1v == tv:
            au, av, bu2, bv2 = n2u, n2v, n3u, n3v
        elif n2u == tu and n2v == tv:
            au, av, bu2, bv2 = n1u, n1v, n3u, n3v
        else:
            au, av, bu2, bv2 = n1u, n1v, n2u, n2v
        du = hu - tu
        dv = hv - tv
        cross_a = du * (av - hv) - dv * (au - hu)
        if cross_a > 0:
            lu, lv, ru, rv = au, av, bu2, bv2
        else:
            lu, lv, ru, rv = bu2, bv2, au, av
        if c == 1:
            nu, nv = lu, lv
        else:
            nu, nv = ru, rv
        tu, tv = hu, hv
        hu, hv = nu, nv
        path[n_path, 0] = hu
        path[n_path, 1] = hv
        n_path += 1
        steps += 1
        if steps > budget:
            return 2, n_path, ntouch, hu, hv


@njit(cache=True, parallel=True)
def mc_hitting(state, q0, r0, tu, tv, hu, hv, bu, bv, seeds, budget,
               mode, flags, fu0, fv0, ccx, ccy, crad, mesh, max_path):
    """Repeated stopped walks; returns per-run (status, last vertex, prev vertex)."""
    n = seeds.shape[0]
    status = np.empty(n, dtype=np.int8)
    hit_u = np.empty(n, dtype=np.int64)
    hit_v = np.empty(n, dtype=np.int64)
    prev_u = np.empty(n, dtype=np.int64)
    prev_v = np.empty(n, dtype=np.int64)
    for i in prange(n):
        colors = np.zeros(state.shape, dtype=np.int8)
        path = np.empty((max_path, 2), dtype=np.int64)
        touched = np.empty((budget + 4, 2), dtype=np.int64)
        st, npath, ntouch, lu, lv = walk(
            state, colors, q0, r0, tu, tv, hu, hv, bu, bv,
            seeds[i], True, budget, mode, flags, fu0, fv0,
            ccx, ccy, crad, mesh, path, touched)
        status[i] = st
        hit_u[i] = lu
        hit_v[i] = lv
        prev_u[i] = path[npath - 2, 0]
        prev_v[i] = path[npath - 2, 1]
    return status, hit_u, hit_v, prev_u, prev_v


# ---------------------------------------------------------------------------
# crossing Monte Carlo
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def mc_crossing(nbr, qs, rs, seed_cells, target_mask, seeds):
    """Blue crossing indicator per run.

    nbr: (ncell, 6) neighbor indices (-1 none); seed_cells: indices of the
    cells adjacent to the source arc; target_mask: cells adjacent to the
    target arc.  A run succeeds when a blue path of cells links them.
    """
    nruns = seeds.shape[0]
    ncell = qs.shape[0]
    hits = np.zeros(nruns, dtype=np.int8)
    for i in prange(nruns):
        s = U64(seeds[i])
        blue = np.empty(ncell, dtype=np.int8)
        for j in range(ncell):
            blue[j] = 1 if _site_bit(s, qs[j], rs[j]) else 0
        seen = np.zeros(ncell, dtype=np.int8)
        stack = np.empty(ncell, dtype=np.int32)
        top = 0
        found = False
        for k in range(seed_cells.shape[0]):
            c = seed_cells[k]
            if blue[c] and not seen[c]:
                seen[c] = 1
                stack[top] = c
                top += 1
        while top > 0 and not found:
            top -= 1
            c = stack[top]
            if target_mask[c]:
                found = True
                break
            for d in range(6):
                nb = nbr[c, d]
                if nb >= 0 and blue[nb] and not seen[nb]:
                    seen[nb] = 1
                    stack[top] = nb
                    top += 1
        hits[i] = 1 if found else 0
    return hits


# ---------------------------------------------------------------------------
# interface strands crossing an annulus
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _next_active_edge(cur, e, colors, e_s1, e_s2, vert_edges):
    for k in range(3):
        e2 = vert_edges[cur, k]
        if e2 < 0 or e2 == e:
            continue
        if colors[e_s1[e2]] != colors[e_s2[e2]]:
            return e2
    return -1


@njit(cache=True)
def _strand_count_one(colors, e_s1, e_s2, e_va, e_vb, vert_edges, vert_zone,
                      stamp, runid, buf):
    """Zone alternations summed over the interface components of one run."""
    ne = e_s1.shape[0]
    total = 0
    for e0 in range(ne):
        if stamp[e0] == runid:
            continue
        if colors[e_s1[e0]] == colors[e_s2[e0]]:
            continue
        # probe from the va side to find an endpoint or detect a cycle
        cur = e_va[e0]
        e = e0
        closed = False
        while True:
            nxt = _next_active_edge(cur, e, colors, e_s1, e_s2, vert_edges)
            if nxt < 0:
                break
            if nxt == e0:
                closed = True
                break
            e = nxt
            cur = e_va[e] if e_vb[e] == cur else e_vb[e]
        # collect the vertex sequence, stamping edges as visited
        if closed:
            start_v = e_va[e0]
            start_e = e0
        else:
            start_v = cur
            start_e = e
        nbuf = 0
        buf[nbuf] = start_v
        nbuf += 1
        cur = start_v
        e = start_e
        while True:
            stamp[e] = runid
            cur = e_va[e] if e_vb[e] == cur else e_vb[e]
            buf[nbuf] = cur
            nbuf += 1
            nxt = _next_active_edge(cur, e, colors, e_s1, e_s2, vert_edges)
            if nxt < 0 or stamp[nxt] == runid:
                break
            e = nxt
        # count zone alternations along buf[0:nbuf]
        first_nz = 0
        last_nz = 0
        for k in range(nbuf):
            z = vert_zone[buf[k]]
            if z != 0:
                if last_nz != 0 and z != last_nz:
                    total += 1
                if first_nz == 0:
                    first_nz = z
                last_nz = z
        if closed and first_nz != 0 and last_nz != first_nz:
            total += 1
    return total


@njit(cache=True, parallel=True)
def mc_strands(qs, rs, e_s1, e_s2, e_va, e_vb, vert_edges, vert_zone, seeds):
    """Annulus-crossing interface strand count per run."""
    nruns = seeds.shape[0]
    ns = qs.shape[0]
    ne = e_s1.shape[0]
    out = np.empty(nruns, dtype=np.int32)
    for i in prange(nruns):
        s = U64(seeds[i])
        colors = np.empty(ns, dtype=np.int8)
        for j in range(ns):
            colors[j] = 1 if _site_bit(s, qs[j], rs[j]) else -1
        stamp = np.full(ne, -1, dtype=np.int64)
        buf = np.empty(2 * ne + 4, dtype=np.int32)
        out[i] = _strand_count_one(colors, e_s1, e_s2, e_va, e_vb,
                                   vert_edges, vert_zone, stamp, i, buf)
    return out


# ---------------------------------------------------------------------------
# Loewner evolution kernels
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _sqrt_h(z):
    w = np.sqrt(z)
    if w.imag < 0.0:
        w = -w
    return w


@njit(cache=True)
def _rel_tip(w_hist, tau_hist, lo, n):
    """Tip of the chain of steps lo..n-1, in the coordinates at step lo.

    Step k grows a slit of capacity tau_hist[k] at driving w_hist[k]
    (relative to the chain origin).
    """
    z = complex(w_hist[n - 1], 0.0) + 2j * np.sqrt(tau_hist[n - 1])
    for k in range(n - 2, lo - 1, -1):
        d = z - w_hist[k]
        z = w_hist[k] + _sqrt_h(d * d - 4.0 * tau_hist[k])
    return z


@njit(cache=True, parallel=True)
def sle_stop_chain(seeds, eps, dt, n_stops, kappa):
    """Successive semi-ball stopping times of the fixed-step chain.

    Returns (tau, xi): per run and stop j, the capacity increment and the
    recentred driving increment W(T_{j+1}) - W(T_j).
    """
    nruns = seeds.shape[0]
    max_m = int(np.ceil(eps * eps / 2.0 / dt)) + 4
    tau = np.zeros((nruns, n_stops))
    xi = np.zeros((nruns, n_stops))
    status = np.zeros(nruns, dtype=np.int8)
    for i in prange(nruns):
        np.random.seed(seeds[i])
        w_hist = np.empty(max_m + 1)
        tau_hist = np.empty(max_m + 1)
        for j in range(n_stops):
            w = 0.0
            n = 0
            while True:
                w += np.sqrt(kappa * dt) * np.random.normal()
                w_hist[n] = w
                tau_hist[n] = dt
                n += 1
                z = _rel_tip(w_hist, tau_hist, 0, n)
                if abs(z) >= eps:
                    break
                if n >= max_m:
                    status[i] = 2
                    break
            tau[i, j] = n * dt
            xi[i, j] = w
            if status[i] != 0:
                break
    return tau, xi, status


@njit(cache=True, parallel=True)
def sle_hit_rays(seeds, xc, xd, tol, target_frac, kappa, max_n):
    """First-hit position on the boundary rays (-inf, xc] u [xd, inf).

    The chordal chain starts at 0 with xc < 0 < xd.  Capacity steps are
    steered by a displacement controller: each step aims to move the tip
    about target_frac times its distance from the rays, which keeps the
    step count bounded under conformal distortion.  Returns (x, status)
    with x the real hit coordinate (clipped onto the rays).
    """
    nruns = seeds.shape[0]
    xs = np.empty(nruns)
    status = np.zeros(nruns, dtype=np.int8)
    scale = min(-xc, xd)
    dt_max = scale * scale / 200.0
    for i in prange(nruns):
        np.random.seed(seeds[i])
        w_hist = np.empty(max_n)
        tau_hist = np.empty(max_n)
        w = 0.0
        n = 0
        d = scale
        tau = dt_max / 10.0
        z_prev = 0.0j
        ok = False
        while n < max_n:
            w += np.sqrt(kappa * tau) * np.random.normal()
            w_hist[n] = w
            tau_hist[n] = tau
            n += 1
            z = _rel_tip(w_hist, tau_hist, 0, n)
            re = z.real
            im = z.imag
            dl = im if re <= xc else np.hypot(re - xc, im)
            dr = im if re >= xd else np.hypot(xd - re, im)
            d = dl if dl < dr else dr
            if d < tol:
                if dl < dr:
                    xs[i] = re if re <= xc else xc
                else:
                    xs[i] = re if re >= xd else xd
                ok = True
                break
            move = abs(z - z_prev)
            if move > 0.0:
                fac = (target_frac * d / move) ** 2
                if fac > 4.0:
                    fac = 4.0
                elif fac < 0.25:
                    fac = 0.25
                tau *= fac
            if tau > dt_max:
                tau = dt_max
            z_prev = z
        if not ok:
            status[i] = 2
            xs[i] = np.nan
    return xs, status


@njit(cache=True, parallel=True)
def sle_hit_adaptive(seeds, eps, tol, target_frac, dt_max, kappa, max_n):
    """First-exit position of the trace from the semi-ball of radius eps.

    Displacement-controlled capacity steps (each aiming to move the tip
    about target_frac times the distance to the circle) resolve the exit
    point to ~tol.  Returns per run the exit angle in (0, pi), the
    capacity at exit, and a status flag.
    """
    nruns = seeds.shape[0]
    angle = np.empty(nruns)
    cap = np.empty(nruns)
    status = np.zeros(nruns, dtype=np.int8)
    for i in prange(nruns):
        np.random.seed(seeds[i])
        w_hist = np.empty(max_n)
        tau_hist = np.empty(max_n)
        w = 0.0
        n = 0
        t = 0.0
        z_prev = 0.0j
        tau = dt_max / 10.0
        ok = False
        while n < max_n:
            w += np.sqrt(kappa * tau) * np.random.normal()
            w_hist[n] = w
            tau_hist[n] = tau
            n += 1
            t += tau
            z = _rel_tip(w_hist, tau_hist, 0, n)
            az = abs(z)
            if az >= eps:
                # interpolate the circle crossing along the last hop
                lo = 0.0
                hi = 1.0
                zp = z_prev
                for _ in range(30):
                    mid = 0.5 * (lo + hi)
                    zm = zp + mid * (z - zp)
                    if abs(zm) >= eps:
                        hi = mid
                    else:
                        lo = mid
                zc = zp + hi * (z - zp)
                angle[i] = np.angle(zc)
                cap[i] = t
                ok = True
                break
            d = eps - az
            if d < tol:
                angle[i] = np.angle(z)
                cap[i] = t
                ok = True
                break
            move = abs(z - z_prev)
            if move > 0.0:
                fac = (target_frac * d / move) ** 2
                if fac > 4.0:
                    fac = 4.0
                elif fac < 0.25:
                    fac = 0.25
                tau *= fac
            if tau > dt_max:
                tau = dt_max
            z_prev = z
        if not ok:
            status[i] = 2
            angle[i] = np.nan
            cap[i] = t
    return angle, cap, status
