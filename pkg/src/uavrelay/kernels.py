"""Hot numeric kernels, each in two flavours.

``*_numpy`` variants are vectorized numpy; the ``_loops`` variants are
plain nested loops compiled with numba when available (see
:mod:`uavrelay.accel`). Callers dispatch on ``accel.USE_NUMBA``; both
flavours use identical argmin tie-breaking (first minimum in scan order)
so they agree to floating-point noise.

The episode loops draw raw uniforms through ``np.random`` seeded at entry
so that the compiled and interpreted builds walk the same Mersenne
Twister stream. Callers must save/restore the global numpy random state
around the interpreted build (see :mod:`uavrelay.simulate`).
"""

import math

import numpy as np

from . import accel


# ---------------------------------------------------------------------------
# greedy service tables
# ---------------------------------------------------------------------------

def comm_tables_numpy(trav, recv, grid_r, grid_ang, n_bins, n_ang, u_radii, hover4,
                      c_star, h0, v_star, p_leg, p_hover):
    """Tabulate the greedy service cost for every (start radius, node, end radius).

    trav: (n_r, P) leg-1 chord length per receive grid point [m]
    recv: (n_g, P) receive hover time per grid point [s]
    grid_r/grid_ang: (P,) receive grid coordinates, radius-major
    hover4: (n_u,) relay hover time per end radius [s]
    c_star/h0: per-meter travel and per-second hover costs at the current
    multiplier; v_star/p_leg/p_hover recover delay and energy at the argmin.

    Returns (ell, delta, energy, r_gu, psi_gu) with shape (n_r, n_g, n_u).
    """
    n_r = trav.shape[0]
    n_g = recv.shape[0]
    n_u = u_radii.size
    bin_radius = grid_r.reshape(n_bins, n_ang)[:, 0]
    ell = np.empty((n_r, n_g, n_u))
    delta = np.empty((n_r, n_g, n_u))
    energy = np.empty((n_r, n_g, n_u))
    r_gu = np.empty((n_r, n_g, n_u))
    psi_gu = np.empty((n_r, n_g, n_u))
    g_rows = np.arange(n_g)
    for i in range(n_r):
        a = c_star * trav[i][None, :] + h0 * recv          # (n_g, P)
        a3 = a.reshape(n_g, n_bins, n_ang)
        ang_idx = a3.argmin(axis=2)                        # (n_g, n_bins)
        a_min = np.take_along_axis(a3, ang_idx[:, :, None], axis=2)[:, :, 0]
        for u in range(n_u):
            tot = a_min + c_star * np.abs(bin_radius[None, :] - u_radii[u])
            bin_idx = tot.argmin(axis=1)                   # (n_g,)
            flat = bin_idx * n_ang + ang_idx[g_rows, bin_idx]
            dist = trav[i, flat] + np.abs(grid_r[flat] - u_radii[u])
            hover = recv[g_rows, flat] + hover4[u]
            ell[i, :, u] = c_star * dist + h0 * hover
            delta[i, :, u] = dist / v_star + hover
            energy[i, :, u] = dist / v_star * p_leg + hover * p_hover
            r_gu[i, :, u] = grid_r[flat]
            psi_gu[i, :, u] = grid_ang[flat]
    return ell, delta, energy, r_gu, psi_gu


def _comm_tables_loops(trav, recv, grid_r, grid_ang, n_bins, n_ang, u_radii, hover4,
                       c_star, h0, v_star, p_leg, p_hover,
                       ell, delta, energy, r_gu, psi_gu):
    n_r = trav.shape[0]
    n_g = recv.shape[0]
    n_u = u_radii.shape[0]
    for i in range(n_r):
        for g in range(n_g):
            bin_min = np.empty(n_bins)
            bin_arg = np.empty(n_bins, dtype=np.int64)
            for b in range(n_bins):
                best = np.inf
                arg = 0
                for k in range(n_ang):
                    p = b * n_ang + k
                    val = c_star * trav[i, p] + h0 * recv[g, p]
                    if val < best:
                        best = val
                        arg = p
                bin_min[b] = best
                bin_arg[b] = arg
            for u in range(n_u):
                best = np.inf
                arg_b = 0
                for b in range(n_bins):
                    val = bin_min[b] + c_star * abs(grid_r[b * n_ang] - u_radii[u])
                    if val < best:
                        best = val
                        arg_b = b
                p = bin_arg[arg_b]
                dist = trav[i, p] + abs(grid_r[p] - u_radii[u])
                hover = recv[g, p] + hover4[u]
                ell[i, g, u] = c_star * dist + h0 * hover
                delta[i, g, u] = dist / v_star + hover
                energy[i, g, u] = dist / v_star * p_leg + hover * p_hover
                r_gu[i, g, u] = grid_r[p]
                psi_gu[i, g, u] = grid_ang[p]


comm_tables_loops = accel.njit(_comm_tables_loops)


def comm_tables(trav, recv, grid_r, grid_ang, n_bins, n_ang, u_radii, hover4,
                c_star, h0, v_star, p_leg, p_hover, force_backend=None):
    backend = force_backend or accel.backend_name()
    if backend == "numba" and accel.HAVE_NUMBA:
        n_r, n_g, n_u = trav.shape[0], recv.shape[0], u_radii.size
        ell = np.empty((n_r, n_g, n_u))
        delta = np.empty((n_r, n_g, n_u))
        energy = np.empty((n_r, n_g, n_u))
        r_gu = np.empty((n_r, n_g, n_u))
        psi_gu = np.empty((n_r, n_g, n_u))
        comm_tables_loops(trav, recv, grid_r, grid_ang, n_bins, n_ang, u_radii, hover4,
                          c_star, h0, v_star, p_leg, p_hover,
                          ell, delta, energy, r_gu, psi_gu)
        return ell, delta, energy, r_gu, psi_gu
    return comm_tables_numpy(trav, recv, grid_r, grid_ang, n_bins, n_ang, u_radii,
                             hover4, c_star, h0, v_star, p_leg, p_hover)


# ---------------------------------------------------------------------------
# episode loops
# ---------------------------------------------------------------------------

def _poisson_from_uniform(u, m):
    """Inverse-CDF Poisson(m) draw from one uniform."""
    term = math.exp(-m)
    cum = term
    k = 0
    while cum < u and k < 10_000:
        k += 1
        term *= m / k
        cum += term
    return k


def _extra_arrivals_from_uniform(u, m):
    """Draw (N | N >= 1) - 1 for N ~ Poisson(m) from one uniform."""
    p0 = math.exp(-m)
    target = p0 + u * (1.0 - p0)
    term = p0
    cum = p0
    k = 0
    while cum < target and k < 10_000:
        k += 1
        term *= m / k
        cum += term
    return max(k - 1, 0)


def _episode_grid_impl(seed, n_cycles, max_stages, burn_in,
                       w_choice, u_choice, wait_power,
                       j_lo, j_hi, w_hi,
                       comm_delta, comm_energy,
                       p_stay, delta0, lam_area,
                       cyc_delay, cyc_energy, cyc_time, cyc_wait, cyc_drops):
    """Simulate the on-grid chain; fills per-cycle output arrays.

    Per waiting step the draw order is: rounding split, arrival test,
    then on arrival the node index and the same-window extra-arrival
    count; each service stage draws one uniform for dropped arrivals.
    """
    np.random.seed(seed)
    n_g = comm_delta.shape[1]
    state_r = 0
    stages = 0
    done = 0
    m_wait = lam_area * delta0
    while done < n_cycles + burn_in and stages < max_stages:
        wait_time = 0.0
        energy = 0.0
        wait_steps = 0
        drops = 0
        gn = -1
        while gn < 0 and stages < max_stages:
            k = w_choice[state_r]
            u1 = np.random.random()
            u2 = np.random.random()
            nxt = j_hi[state_r, k] if u1 < w_hi[state_r, k] else j_lo[state_r, k]
            wait_time += delta0
            energy += delta0 * wait_power[state_r]
            stages += 1
            wait_steps += 1
            state_r = nxt
            if u2 >= p_stay:
                u3 = np.random.random()
                gn = int(u3 * n_g)
                if gn >= n_g:
                    gn = n_g - 1
                if m_wait > 0.0:
                    drops += _extra_arrivals_from_uniform(np.random.random(), m_wait)
        if gn < 0:
            break
        d_c = comm_delta[state_r, gn]
        e_c = comm_energy[state_r, gn]
        if lam_area > 0.0:
            drops += _poisson_from_uniform(np.random.random(), lam_area * d_c)
        stages += 1
        state_r = u_choice[state_r, gn]
        if done >= burn_in:
            i = done - burn_in
            cyc_delay[i] = d_c
            cyc_energy[i] = energy + e_c
            cyc_time[i] = wait_time + d_c
            cyc_wait[i] = wait_steps
            cyc_drops[i] = drops
        done += 1
    return done - burn_in if done > burn_in else 0


episode_grid_compiled = accel.njit(_episode_grid_impl)


def _episode_continuum_impl(seed, n_cycles, max_stages, burn_in,
                            w_choice, u_choice, v_of_w, pw_radial, pw_circle, radii,
                            gn_r, gn_theta,
                            c_r_gu, c_psi_gu, c_theta_ub, c_v1, c_v3, c_p1, c_p3,
                            p_stay, delta0, lam_area, cell_a,
                            bandwidth, gamma_gu, gamma_ub, h_uav, h_bs, payload,
                            p_hover,
                            cyc_delay, cyc_energy, cyc_time, cyc_wait, cyc_drops):
    """Continuous-location twin of the grid episode.

    Requests arrive at true disc locations; the policy is read at the
    nearest grid state; phase costs are evaluated at the true geometry.
    """
    np.random.seed(seed)
    n_r = radii.shape[0]
    n_g = gn_r.shape[0]
    spacing = radii[1] - radii[0] if n_r > 1 else 1.0
    dh = h_uav - h_bs
    state_r = 0.0
    stages = 0
    done = 0
    m_wait = lam_area * delta0
    while done < n_cycles + burn_in and stages < max_stages:
        wait_time = 0.0
        energy = 0.0
        wait_steps = 0
        drops = 0
        have_req = False
        req_r = 0.0
        req_t = 0.0
        while not have_req and stages < max_stages:
            ridx = int(math.floor(state_r / spacing + 0.5))
            if ridx > n_r - 1:
                ridx = n_r - 1
            k = w_choice[ridx]
            u2 = np.random.random()
            v_r = v_of_w[k]
            power = pw_radial[k] if state_r == 0.0 else pw_circle[k]
            nxt = state_r + v_r * delta0
            if nxt < 0.0:
                nxt = 0.0
            elif nxt > cell_a:
                nxt = cell_a
            wait_time += delta0
            energy += delta0 * power
            stages += 1
            wait_steps += 1
            state_r = nxt
            if u2 >= p_stay:
                req_r = cell_a * math.sqrt(np.random.random())
                req_t = 2.0 * math.pi * np.random.random()
                have_req = True
                if m_wait > 0.0:
                    drops += _extra_arrivals_from_uniform(np.random.random(), m_wait)
        if not have_req:
            break
        # nearest grid node to the true request location
        best = np.inf
        gn = 0
        for g in range(n_g):
            d2 = (req_r * req_r + gn_r[g] * gn_r[g]
                  - 2.0 * req_r * gn_r[g] * math.cos(req_t - gn_theta[g]))
            if d2 < best:
                best = d2
                gn = g
        ridx = int(math.floor(state_r / spacing + 0.5))
        if ridx > n_r - 1:
            ridx = n_r - 1
        r_gu = c_r_gu[ridx, gn]
        psi_gu = c_psi_gu[ridx, gn]
        theta_ub = c_theta_ub[ridx, gn]
        v1 = c_v1[ridx, gn]
        v3 = c_v3[ridx, gn]
        r_ub = radii[u_choice[ridx, gn]]
        leg1 = math.sqrt(max(state_r * state_r + r_gu * r_gu
                             - 2.0 * state_r * r_gu * math.cos(psi_gu), 0.0))
        d1 = leg1 / v1 if leg1 > 0.0 else 0.0
        ground = math.sqrt(max(r_gu * r_gu + req_r * req_r
                               - 2.0 * r_gu * req_r * math.cos(psi_gu - req_t), 0.0))
        d_gu2 = h_uav * h_uav + ground * ground
        d2s = payload / (bandwidth * math.log2(1.0 + gamma_gu / d_gu2))
        leg3 = math.sqrt(max(r_gu * r_gu + r_ub * r_ub
                             - 2.0 * r_gu * r_ub * math.cos(psi_gu - theta_ub), 0.0))
        d3 = leg3 / v3 if leg3 > 0.0 else 0.0
        d4 = payload / (bandwidth * math.log2(1.0 + gamma_ub / (dh * dh + r_ub * r_ub)))
        d_c = d1 + d2s + d3 + d4
        e_c = (d1 * c_p1[ridx, gn] + d3 * c_p3[ridx, gn] + (d2s + d4) * p_hover)
        if lam_area > 0.0:
            drops += _poisson_from_uniform(np.random.random(), lam_area * d_c)
        stages += 1
        state_r = r_ub
        if done >= burn_in:
            i = done - burn_in
            cyc_delay[i] = d_c
            cyc_energy[i] = energy + e_c
            cyc_time[i] = wait_time + d_c
            cyc_wait[i] = wait_steps
            cyc_drops[i] = drops
        done += 1
    recorded = done - burn_in if done > burn_in else 0
    return recorded


episode_continuum_compiled = accel.njit(_episode_continuum_impl)
