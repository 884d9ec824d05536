"""Compiled numerical core shared by the public modules.

Every frame rotation, aerodynamic build-up, integration step and
environment update funnels through the njit kernels below so that the
fast simulation loop and the public API produce bit-identical numbers.
Kernels signal failures through integer status codes; the wrapping
modules translate those into typed exceptions.

State vector layout (12,): [pn, pe, pd, phi, theta, psi, u, v, w, p, q, r]
"""

import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_GIMBAL_LOCK = 1
# degenerate airflow on surface i is encoded as DEGENERATE_BASE + i
STATUS_DEGENERATE_BASE = 100

GIMBAL_MARGIN = 1e-3

# termination causes reported by env_step
CAUSE_NONE = 0
CAUSE_IMPACT = 1
CAUSE_TARGET_LOST = 2
CAUSE_GIMBAL_FAULT = 3


@njit(cache=True)
def wrap_angle(a):
    """Wrap an angle into (-pi, pi]."""
    if -math.pi < a <= math.pi:
        return a
    return math.pi - (math.pi - a) % (2.0 * math.pi)


@njit(cache=True)
def euler_to_dcm(phi, theta, psi, out):
    """Fill `out` with the body->NED DCM for ZYX (yaw-pitch-roll) angles."""
    cphi = math.cos(phi)
    sphi = math.sin(phi)
    cth = math.cos(theta)
    sth = math.sin(theta)
    cpsi = math.cos(psi)
    spsi = math.sin(psi)
    out[0, 0] = cpsi * cth
    out[0, 1] = cpsi * sth * sphi - spsi * cphi
    out[0, 2] = cpsi * sth * cphi + spsi * sphi
    out[1, 0] = spsi * cth
    out[1, 1] = spsi * sth * sphi + cpsi * cphi
    out[1, 2] = spsi * sth * cphi - cpsi * sphi
    out[2, 0] = -sth
    out[2, 1] = cth * sphi
    out[2, 2] = cth * cphi


@njit(cache=True)
def euler_rate_matrix(phi, theta, out):
    """Fill `out` with H(Theta) mapping body rates to Euler-angle rates.

    Returns STATUS_GIMBAL_LOCK when |theta| is within GIMBAL_MARGIN of
    the +-pi/2 singularity.
    """
    if abs(theta) >= 0.5 * math.pi - GIMBAL_MARGIN:
        return STATUS_GIMBAL_LOCK
    cphi = math.cos(phi)
    sphi = math.sin(phi)
    cth = math.cos(theta)
    tth = math.tan(theta)
    out[0, 0] = 1.0
    out[0, 1] = sphi * tth
    out[0, 2] = cphi * tth
    out[1, 0] = 0.0
    out[1, 1] = cphi
    out[1, 2] = -sphi
    out[2, 0] = 0.0
    out[2, 1] = sphi / cth
    out[2, 2] = cphi / cth
    return STATUS_OK


@njit(cache=True)
def wind_frame_dcm(alpha, beta, out):
    """Fill `out` with the wing->wind DCM built from (alpha, beta).

    Row i is the i-th wind-frame axis expressed in wing coordinates;
    x_wind is aligned with the local airspeed vector so drag along
    -x_wind opposes the motion through the air.
    """
    ca = math.cos(alpha)
    sa = math.sin(alpha)
    cb = math.cos(beta)
    sb = math.sin(beta)
    out[0, 0] = ca * cb
    out[0, 1] = sb
    out[0, 2] = sa * cb
    out[1, 0] = -ca * sb
    out[1, 1] = cb
    out[1, 2] = -sa * sb
    out[2, 0] = -sa
    out[2, 1] = 0.0
    out[2, 2] = ca


@njit(cache=True)
def deflection_dcm(delta, out):
    """Frame rotation of a wing frame about its y (hinge) axis.

    Positive delta pitches the surface leading-edge up, which raises its
    local incidence; composing with the zero-deflection mounting gives
    the deflected body->wing DCM.
    """
    cd = math.cos(delta)
    sd = math.sin(delta)
    out[0, 0] = cd
    out[0, 1] = 0.0
    out[0, 2] = -sd
    out[1, 0] = 0.0
    out[1, 1] = 1.0
    out[1, 2] = 0.0
    out[2, 0] = sd
    out[2, 1] = 0.0
    out[2, 2] = cd


# sgeo column layout for the packed per-surface geometry table
GEO_AREA = 0
GEO_CHORD = 1
GEO_CLA = 2
GEO_CL0 = 3
GEO_CD0 = 4
GEO_CM0 = 5
GEO_INV_PEAR = 6   # 1 / (pi * e * AR)
GEO_STALL = 7
GEO_DSIGN = 8
GEO_NCOLS = 9


@njit(cache=True)
def surface_coefficients(alpha, cla, cl0, cd0, cm0, inv_pear, stall):
    """Lift/drag/moment coefficients with the post-stall lift plateau."""
    cl = cl0 + cla * alpha
    cl_hi = cl0 + cla * stall
    cl_lo = cl0 - cla * stall
    if cl > cl_hi:
        cl = cl_hi
    elif cl < cl_lo:
        cl = cl_lo
    cd = cd0 + cl * cl * inv_pear
    return cl, cd, cm0


@njit(cache=True)
def total_wrench(v_body, omega, wind_body, rho, delta_el, delta_ail,
                 act_limit, sp, swb, sgeo, fus, force_out, moment_out):
    """Sum aerodynamic force/moment over all surfaces plus fuselage drag.

    Per surface: local airspeed at the neutral point, rotate into the
    (deflected) wing frame, coefficients, dimensional lift/drag/moment in
    the wind frame, rotate back to body and transport the moment to the
    CG.  Returns a status code carrying the surface index on degenerate
    airflow.
    """
    force_out[0] = 0.0
    force_out[1] = 0.0
    force_out[2] = 0.0
    moment_out[0] = 0.0
    moment_out[1] = 0.0
    moment_out[2] = 0.0

    cwb = np.empty((3, 3))
    ddcm = np.empty((3, 3))
    csw = np.empty((3, 3))

    n = sp.shape[0]
    for i in range(n):
        px = sp[i, 0]
        py = sp[i, 1]
        pz = sp[i, 2]

        # airspeed of the surface point through the air, body frame
        vx = v_body[0] + omega[1] * pz - omega[2] * py - wind_body[0]
        vy = v_body[1] + omega[2] * px - omega[0] * pz - wind_body[1]
        vz = v_body[2] + omega[0] * py - omega[1] * px - wind_body[2]

        dsign = sgeo[i, GEO_DSIGN]
        if dsign != 0.0:
            d = delta_el + dsign * delta_ail
            if d > act_limit:
                d = act_limit
            elif d < -act_limit:
                d = -act_limit
            deflection_dcm(d, ddcm)
            for r in range(3):
                for c in range(3):
                    cwb[r, c] = (ddcm[r, 0] * swb[i, 0, c]
                                 + ddcm[r, 1] * swb[i, 1, c]
                                 + ddcm[r, 2] * swb[i, 2, c])
        else:
            for r in range(3):
                for c in range(3):
                    cwb[r, c] = swb[i, r, c]

        uw = cwb[0, 0] * vx + cwb[0, 1] * vy + cwb[0, 2] * vz
        vw = cwb[1, 0] * vx + cwb[1, 1] * vy + cwb[1, 2] * vz
        ww = cwb[2, 0] * vx + cwb[2, 1] * vy + cwb[2, 2] * vz

        if abs(uw) <= 0.1:
            return STATUS_DEGENERATE_BASE + i

        vmag = math.sqrt(uw * uw + vw * vw + ww * ww)
        alpha = math.atan2(ww, uw)
        beta = math.asin(vw / vmag)
        qbar = 0.5 * rho * vmag * vmag

        cl, cd, cm = surface_coefficients(
            alpha, sgeo[i, GEO_CLA], sgeo[i, GEO_CL0], sgeo[i, GEO_CD0],
            sgeo[i, GEO_CM0], sgeo[i, GEO_INV_PEAR], sgeo[i, GEO_STALL])

        area = sgeo[i, GEO_AREA]
        lift = qbar * area * cl
        drag = qbar * area * cd
        pitch = qbar * area * sgeo[i, GEO_CHORD] * cm

        wind_frame_dcm(alpha, beta, csw)

        # wind-frame force (-drag, 0, -lift) back to the wing frame
        fwx = -csw[0, 0] * drag - csw[2, 0] * lift
        fwy = -csw[0, 1] * drag - csw[2, 1] * lift
        fwz = -csw[0, 2] * drag - csw[2, 2] * lift
        # wind-frame moment (0, pitch, 0) back to the wing frame
        mwx = csw[1, 0] * pitch
        mwy = csw[1, 1] * pitch
        mwz = csw[1, 2] * pitch

        # wing -> body
        fbx = cwb[0, 0] * fwx + cwb[1, 0] * fwy + cwb[2, 0] * fwz
        fby = cwb[0, 1] * fwx + cwb[1, 1] * fwy + cwb[2, 1] * fwz
        fbz = cwb[0, 2] * fwx + cwb[1, 2] * fwy + cwb[2, 2] * fwz
        mbx = cwb[0, 0] * mwx + cwb[1, 0] * mwy + cwb[2, 0] * mwz
        mby = cwb[0, 1] * mwx + cwb[1, 1] * mwy + cwb[2, 1] * mwz
        mbz = cwb[0, 2] * mwx + cwb[1, 2] * mwy + cwb[2, 2] * mwz

        force_out[0] += fbx
        force_out[1] += fby
        force_out[2] += fbz
        # transport to CG: moment += p x F
        moment_out[0] += mbx + py * fbz - pz * fby
        moment_out[1] += mby + pz * fbx - px * fbz
        moment_out[2] += mbz + px * fby - py * fbx

    # fuselage: pure drag anti-parallel to the CG airflow
    vcx = v_body[0] - wind_body[0]
    vcy = v_body[1] - wind_body[1]
    vcz = v_body[2] - wind_body[2]
    vc = math.sqrt(vcx * vcx + vcy * vcy + vcz * vcz)
    if vc > 1e-12:
        k = -0.5 * rho * vc * fus[0] * fus[1]
        force_out[0] += k * vcx
        force_out[1] += k * vcy
        force_out[2] += k * vcz

    return STATUS_OK


@njit(cache=True)
def state_derivative(x, force, moment, mass, inertia, inv_inertia,
                     gravity, out):
    """Flat-earth rigid-body derivative of the 12-component state."""
    phi = x[3]
    theta = x[4]
    psi = x[5]
    u = x[6]
    v = x[7]
    w = x[8]
    p = x[9]
    q = x[10]
    r = x[11]

    if abs(theta) >= 0.5 * math.pi - GIMBAL_MARGIN:
        return STATUS_GIMBAL_LOCK

    cphi = math.cos(phi)
    sphi = math.sin(phi)
    cth = math.cos(theta)
    sth = math.sin(theta)
    cpsi = math.cos(psi)
    spsi = math.sin(psi)
    tth = sth / cth

    # position rate: B v_body (B maps body -> NED)
    b00 = cpsi * cth
    b01 = cpsi * sth * sphi - spsi * cphi
    b02 = cpsi * sth * cphi + spsi * sphi
    b10 = spsi * cth
    b11 = spsi * sth * sphi + cpsi * cphi
    b12 = spsi * sth * cphi - cpsi * sphi
    b20 = -sth
    b21 = cth * sphi
    b22 = cth * cphi
    out[0] = b00 * u + b01 * v + b02 * w
    out[1] = b10 * u + b11 * v + b12 * w
    out[2] = b20 * u + b21 * v + b22 * w

    # attitude rate: H(Theta) omega
    out[3] = p + sphi * tth * q + cphi * tth * r
    out[4] = cphi * q - sphi * r
    out[5] = sphi / cth * q + cphi / cth * r

    # velocity rate: F/m + B^T g - omega x v  (gravity rotated NED -> body)
    gx = b20 * gravity
    gy = b21 * gravity
    gz = b22 * gravity
    out[6] = force[0] / mass + gx - (q * w - r * v)
    out[7] = force[1] / mass + gy - (r * u - p * w)
    out[8] = force[2] / mass + gz - (p * v - q * u)

    # rate derivative: I^-1 (M - omega x (I omega))
    hx = inertia[0, 0] * p + inertia[0, 1] * q + inertia[0, 2] * r
    hy = inertia[1, 0] * p + inertia[1, 1] * q + inertia[1, 2] * r
    hz = inertia[2, 0] * p + inertia[2, 1] * q + inertia[2, 2] * r
    tx = moment[0] - (q * hz - r * hy)
    ty = moment[1] - (r * hx - p * hz)
    tz = moment[2] - (p * hy - q * hx)
    out[9] = inv_inertia[0, 0] * tx + inv_inertia[0, 1] * ty + inv_inertia[0, 2] * tz
    out[10] = inv_inertia[1, 0] * tx + inv_inertia[1, 1] * ty + inv_inertia[1, 2] * tz
    out[11] = inv_inertia[2, 0] * tx + inv_inertia[2, 1] * ty + inv_inertia[2, 2] * tz
    return STATUS_OK


@njit(cache=True)
def aero_derivative(x, wind_ned, rho, delta_el, delta_ail, act_limit,
                    sp, swb, sgeo, fus, mass, inertia, inv_inertia,
                    gravity, force_tmp, moment_tmp, out):
    """Derivative with the aero wrench evaluated at the given sub-state.

    The gust vector is frozen in NED over a step and re-rotated into the
    body frame at every evaluation so the RK4 stages see a consistent
    atmosphere.
    """
    phi = x[3]
    theta = x[4]
    psi = x[5]
    if abs(theta) >= 0.5 * math.pi - GIMBAL_MARGIN:
        return STATUS_GIMBAL_LOCK

    cphi = math.cos(phi)
    sphi = math.sin(phi)
    cth = math.cos(theta)
    sth = math.sin(theta)
    cpsi = math.cos(psi)
    spsi = math.sin(psi)

    # wind NED -> body via B^T
    wn = wind_ned[0]
    we = wind_ned[1]
    wd = wind_ned[2]
    wbx = cpsi * cth * wn + spsi * cth * we - sth * wd
    wby = ((cpsi * sth * sphi - spsi * cphi) * wn
           + (spsi * sth * sphi + cpsi * cphi) * we + cth * sphi * wd)
    wbz = ((cpsi * sth * cphi + spsi * sphi) * wn
           + (spsi * sth * cphi - cpsi * sphi) * we + cth * cphi * wd)

    wind_body = np.empty(3)
    wind_body[0] = wbx
    wind_body[1] = wby
    wind_body[2] = wbz

    status = total_wrench(x[6:9], x[9:12], wind_body, rho, delta_el,
                          delta_ail, act_limit, sp, swb, sgeo, fus,
                          force_tmp, moment_tmp)
    if status != STATUS_OK:
        return status
    return state_derivative(x, force_tmp, moment_tmp, mass, inertia,
                            inv_inertia, gravity, out)


@njit(cache=True)
def rk4_aero_step(x, dt, wind_ned, rho, delta_el, delta_ail, act_limit,
                  sp, swb, sgeo, fus, mass, inertia, inv_inertia,
                  gravity, out):
    """One classical RK4 step of the aero-coupled 6-DOF equations."""
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    xt = np.empty(12)
    ftmp = np.empty(3)
    mtmp = np.empty(3)

    status = aero_derivative(x, wind_ned, rho, delta_el, delta_ail,
                             act_limit, sp, swb, sgeo, fus, mass, inertia,
                             inv_inertia, gravity, ftmp, mtmp, k1)
    if status != STATUS_OK:
        return status
    for i in range(12):
        xt[i] = x[i] + 0.5 * dt * k1[i]
    status = aero_derivative(xt, wind_ned, rho, delta_el, delta_ail,
                             act_limit, sp, swb, sgeo, fus, mass, inertia,
                             inv_inertia, gravity, ftmp, mtmp, k2)
    if status != STATUS_OK:
        return status
    for i in range(12):
        xt[i] = x[i] + 0.5 * dt * k2[i]
    status = aero_derivative(xt, wind_ned, rho, delta_el, delta_ail,
                             act_limit, sp, swb, sgeo, fus, mass, inertia,
                             inv_inertia, gravity, ftmp, mtmp, k3)
    if status != STATUS_OK:
        return status
    for i in range(12):
        xt[i] = x[i] + dt * k3[i]
    status = aero_derivative(xt, wind_ned, rho, delta_el, delta_ail,
                             act_limit, sp, swb, sgeo, fus, mass, inertia,
                             inv_inertia, gravity, ftmp, mtmp, k4)
    if status != STATUS_OK:
        return status

    for i in range(12):
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    out[3] = wrap_angle(out[3])
    out[5] = wrap_angle(out[5])
    return STATUS_OK


@njit(cache=True)
def dryden_update(xs, noise, airspeed, dt, scale, sigma):
    """Advance the three gust shaping filters by one sample.

    xs     : (5,) filter state [u, v0, v1, w0, w1], mutated in place
    noise  : (5,) unit normal draws
    scale  : (3,) scale lengths L_u, L_v, L_w
    sigma  : (3,) intensities
    Returns (gust_n, gust_e, gust_d).

    The u channel is the exactly sampled first-order Gauss-Markov
    process; v and w use the exact discretization of the second-order
    shaping filter, so the stationary variance of each axis equals
    sigma^2 for any dt.
    """
    v_eff = airspeed
    if v_eff < 0.5:
        v_eff = 0.5

    # u channel (first order)
    a = v_eff / scale[0]
    ph = math.exp(-a * dt)
    b = sigma[0] * math.sqrt(max(1.0 - ph * ph, 0.0))
    xs[0] = ph * xs[0] + b * noise[0]
    gust_n = xs[0]

    gusts = np.empty(2)
    for ch in range(2):
        a = v_eff / scale[ch + 1]
        sig = sigma[ch + 1]
        e1 = math.exp(-a * dt)
        # Ad = e^{-a dt} (I + N dt) with nilpotent N = A + aI
        ad00 = e1 * (1.0 + a * dt)
        ad01 = e1 * dt
        ad10 = -e1 * a * a * dt
        ad11 = e1 * (1.0 - a * dt)
        # exact process-noise covariance over dt (s = 2a)
        s = 2.0 * a
        e2 = math.exp(-s * dt)
        i1 = 2.0 / (s * s * s) - e2 * (dt * dt / s + 2.0 * dt / (s * s)
                                       + 2.0 / (s * s * s))
        j = 1.0 / (s * s) - e2 * (dt / s + 1.0 / (s * s))
        kk = (1.0 - e2) / s
        i2 = j - a * i1
        i3 = kk - 2.0 * a * j + a * a * i1
        l11 = math.sqrt(max(i1, 0.0))
        if l11 > 0.0:
            l21 = i2 / l11
        else:
            l21 = 0.0
        l22 = math.sqrt(max(i3 - l21 * l21, 0.0))

        x0 = xs[1 + 2 * ch]
        x1 = xs[2 + 2 * ch]
        n0 = noise[1 + 2 * ch]
        n1 = noise[2 + 2 * ch]
        y0 = ad00 * x0 + ad01 * x1 + l11 * n0
        y1 = ad10 * x0 + ad11 * x1 + l21 * n0 + l22 * n1
        xs[1 + 2 * ch] = y0
        xs[2 + 2 * ch] = y1
        # output gain sigma*sqrt(3a) on (s + a/sqrt(3)) / (s + a)^2
        kgain = sig * math.sqrt(3.0 * a)
        gusts[ch] = kgain * (a / math.sqrt(3.0) * y0 + y1)

    return gust_n, gusts[0], gusts[1]


@njit(cache=True)
def project_target(x, target, ccb, f, cx, cy, half_w, half_h, out):
    """Pinhole projection of the target into normalized image coords.

    out = [u, v, visible, depth].  Coordinates are the pinhole division
    scaled so the sensor edges map to +-1; they stay meaningful (just
    out of range) when the target is outside the field of view, and are
    zeroed when the target is behind the image plane.
    """
    phi = x[3]
    theta = x[4]
    psi = x[5]
    cphi = math.cos(phi)
    sphi = math.sin(phi)
    cth = math.cos(theta)
    sth = math.sin(theta)
    cpsi = math.cos(psi)
    spsi = math.sin(psi)

    rn = target[0] - x[0]
    re = target[1] - x[1]
    rd = target[2] - x[2]

    # NED -> body via B^T
    bx = cpsi * cth * rn + spsi * cth * re - sth * rd
    by = ((cpsi * sth * sphi - spsi * cphi) * rn
          + (spsi * sth * sphi + cpsi * cphi) * re + cth * sphi * rd)
    bz = ((cpsi * sth * cphi + spsi * sphi) * rn
          + (spsi * sth * cphi - cpsi * sphi) * re + cth * cphi * rd)

    # body -> camera (x right, y down, z boresight)
    xc = ccb[0, 0] * bx + ccb[0, 1] * by + ccb[0, 2] * bz
    yc = ccb[1, 0] * bx + ccb[1, 1] * by + ccb[1, 2] * bz
    zc = ccb[2, 0] * bx + ccb[2, 1] * by + ccb[2, 2] * bz

    if abs(zc) < 1e-12:
        out[0] = 0.0
        out[1] = 0.0
        out[2] = 0.0
        out[3] = zc
        return

    col = f * xc / zc + cx
    row = f * yc / zc + cy
    u = (col - cx) / half_w
    v = (row - cy) / half_h
    if zc <= 0.0:
        out[0] = 0.0
        out[1] = 0.0
        out[2] = 0.0
    else:
        out[0] = u
        out[1] = v
        out[2] = 1.0 if (abs(u) <= 1.0 and abs(v) <= 1.0) else 0.0
    out[3] = zc


@njit(cache=True)
def clamp_unit(x):
    if x > 1.0:
        return 1.0
    if x < -1.0:
        return -1.0
    return x


@njit(cache=True)
def env_step(x, dryden_xs, noise, action_el_n, action_ail_n,
             mean_wind, turb_enabled, turb_scale, turb_sigma,
             sp, swb, sgeo, fus, mass, inertia, inv_inertia,
             target, ccb, cam_par, envp, lost_streak,
             x_out, obs_out, misc_out):
    """One full environment update: gusts, RK4, projection, reward.

    cam_par : [f, cx, cy, half_w, half_h]
    envp    : [rho, gravity, dt, w1, w2, w3, act_limit, terminal_penalty,
               p_max, q_max, lock_loss_steps]
    misc_out: [reward, cause, lost_streak, impact_x, impact_y,
               miss_so_far, delta_el, delta_ail, gust_n, gust_e, gust_d,
               visible]
    The target-lost cause fires only after the target has been out of
    frame for lock_loss_steps consecutive steps (`lost_streak` carries
    the running count); an impact or fault inside that window wins.
    Returns STATUS_OK or a kernel status; x_out holds the new state on
    success and the pre-step state on gimbal failure.
    """
    rho = envp[0]
    gravity = envp[1]
    dt = envp[2]
    w1 = envp[3]
    w2 = envp[4]
    w3 = envp[5]
    act_limit = envp[6]
    terminal_penalty = envp[7]
    p_max = envp[8]
    q_max = envp[9]
    lock_loss_steps = int(envp[10])

    # de-normalize and clamp the action
    ael = clamp_unit(action_el_n)
    aail = clamp_unit(action_ail_n)
    delta_el = ael * act_limit
    delta_ail = aail * act_limit

    # advance turbulence with the airspeed relative to the mean wind
    wind_ned = np.empty(3)
    gn = 0.0
    ge = 0.0
    gd = 0.0
    if turb_enabled != 0:
        phi = x[3]
        theta = x[4]
        psi = x[5]
        cphi = math.cos(phi)
        sphi = math.sin(phi)
        cth = math.cos(theta)
        sth = math.sin(theta)
        cpsi = math.cos(psi)
        spsi = math.sin(psi)
        wbx = cpsi * cth * mean_wind[0] + spsi * cth * mean_wind[1] - sth * mean_wind[2]
        wby = ((cpsi * sth * sphi - spsi * cphi) * mean_wind[0]
               + (spsi * sth * sphi + cpsi * cphi) * mean_wind[1]
               + cth * sphi * mean_wind[2])
        wbz = ((cpsi * sth * cphi + spsi * sphi) * mean_wind[0]
               + (spsi * sth * cphi - cpsi * sphi) * mean_wind[1]
               + cth * cphi * mean_wind[2])
        rvx = x[6] - wbx
        rvy = x[7] - wby
        rvz = x[8] - wbz
        airspeed = math.sqrt(rvx * rvx + rvy * rvy + rvz * rvz)
        gn, ge, gd = dryden_update(dryden_xs, noise, airspeed, dt,
                                   turb_scale, turb_sigma)
    wind_ned[0] = mean_wind[0] + gn
    wind_ned[1] = mean_wind[1] + ge
    wind_ned[2] = mean_wind[2] + gd

    status = rk4_aero_step(x, dt, wind_ned, rho, delta_el, delta_ail,
                           act_limit, sp, swb, sgeo, fus, mass, inertia,
                           inv_inertia, gravity, x_out)

    cause = CAUSE_NONE
    if status != STATUS_OK:
        for i in range(12):
            x_out[i] = x[i]
        cause = CAUSE_GIMBAL_FAULT

    # ground impact with sub-step interpolation of the crossing point
    impact_x = 0.0
    impact_y = 0.0
    if cause == CAUSE_NONE and x_out[2] >= 0.0:
        cause = CAUSE_IMPACT
        dz = x_out[2] - x[2]
        if dz > 1e-12:
            tau = (0.0 - x[2]) / dz
        else:
            tau = 1.0
        impact_x = x[0] + tau * (x_out[0] - x[0])
        impact_y = x[1] + tau * (x_out[1] - x[1])

    proj = np.empty(4)
    project_target(x_out, target, ccb, cam_par[0], cam_par[1], cam_par[2],
                   cam_par[3], cam_par[4], proj)
    visible = proj[2] != 0.0

    if visible:
        lost_streak = 0
    else:
        lost_streak += 1
        if cause == CAUSE_NONE and lost_streak >= lock_loss_steps:
            cause = CAUSE_TARGET_LOST

    # observation (clamped to [-1, 1])
    obs_out[0] = clamp_unit(x_out[3] / math.pi)
    obs_out[1] = clamp_unit(x_out[4] / (0.5 * math.pi))
    obs_out[2] = clamp_unit(x_out[9] / p_max)
    obs_out[3] = clamp_unit(x_out[10] / q_max)
    obs_out[4] = clamp_unit(proj[0])
    obs_out[5] = clamp_unit(proj[1])

    # reward: edge-clamped tracking error plus actuator cost; losing the
    # lock (or a gimbal fault) scores the one-time terminal penalty
    if cause == CAUSE_TARGET_LOST or cause == CAUSE_GIMBAL_FAULT:
        reward = -terminal_penalty
    else:
        if visible or proj[3] > 0.0:
            cam_dist = math.sqrt(obs_out[4] * obs_out[4]
                                 + obs_out[5] * obs_out[5])
        else:
            cam_dist = math.sqrt(2.0)  # behind the camera: corner distance
        reward = -(w1 * cam_dist + w2 * ael * ael + w3 * aail * aail)

    dx = x_out[0] - target[0]
    dy = x_out[1] - target[1]
    miss_so_far = math.sqrt(dx * dx + dy * dy)

    misc_out[0] = reward
    misc_out[1] = float(cause)
    misc_out[2] = float(lost_streak)
    misc_out[3] = impact_x
    misc_out[4] = impact_y
    misc_out[5] = miss_so_far
    misc_out[6] = delta_el
    misc_out[7] = delta_ail
    misc_out[8] = gn
    misc_out[9] = ge
    misc_out[10] = gd
    misc_out[11] = 1.0 if visible else 0.0
    return STATUS_OK
