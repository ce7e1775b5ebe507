"""Thermal coefficient laws and the (delta, gamma) consistency system of a solidification front"""
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import config
from config import (
    PARAM_FLOOR,
    STEFAN_MAX_SWEEPS,
    STEFAN_DAMPING,
    STEFAN_MAX_DAMPINGS,
    STEFAN_DEFAULT_TOL,
)
from contraction import Params, contraction_constants
from grid import evaluate
from picard import SolverOptions, solve_phi
from shooting import ShootingOptions, shoot
from utils import sign


class InfeasibleParametersError(ValueError):
    pass


class StefanConvergenceError(ValueError):
    """The sweep cap was reached; carries the last iterate and its residuals"""

    def __init__(self, message: str, delta: float, gamma: float, residuals: Tuple[float, float], sweeps: int):
        super().__init__(message)
        self.delta = delta
        self.gamma = gamma
        self.residuals = residuals
        self.sweeps = sweeps


@dataclass(frozen=True)
class ThermalCoefficients:
    c_ref: float    # J/(kg K)
    k_ref: float    # W/(m K)
    alpha: float
    beta: float
    theta_i: float  # K
    theta_o: float  # K

    def __post_init__(self):
        if not self.c_ref > 0:
            raise ValueError("c_ref must be positive")
        if not self.k_ref > 0:
            raise ValueError("k_ref must be positive")
        if self.theta_i == self.theta_o:
            raise ValueError("theta_i and theta_o must differ")

    def is_solidification(self) -> bool:
        return self.theta_o < self.theta_i


@dataclass(frozen=True)
class StefanPhaseParams:
    alpha: float
    beta: float
    # lambda = s(t) / (2 sqrt(a t)): front position s over the solid-phase diffusion length
    lambda_: float
    delta: float
    gamma: float
    phi_at_lambda: float
    method: str
    sweeps: int
    residual_alpha: float
    residual_beta: float

    def to_dict(self) -> Dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "lambda": self.lambda_,
            "delta": self.delta,
            "gamma": self.gamma,
            "phi_at_lambda": self.phi_at_lambda,
            "method": self.method,
            "sweeps": self.sweeps,
            "residual_alpha": self.residual_alpha,
            "residual_beta": self.residual_beta,
        }


def _offset(theta: float, tc: ThermalCoefficients) -> float:
    return (theta - tc.theta_o) / (tc.theta_i - tc.theta_o)


def specific_heat(theta: float, tc: ThermalCoefficients) -> float:
    """c(theta) = c_ref (1 + alpha (theta - theta_o)/(theta_i - theta_o))"""
    value = tc.c_ref * (1.0 + tc.alpha * _offset(theta, tc))
    if value <= 0:
        raise ValueError(f"specific heat is nonpositive at theta = {theta}")
    return value


def thermal_conductivity(theta: float, tc: ThermalCoefficients) -> float:
    """k(theta) = k_ref (1 + beta (theta - theta_o)/(theta_i - theta_o))"""
    value = tc.k_ref * (1.0 + tc.beta * _offset(theta, tc))
    if value <= 0:
        raise ValueError(f"thermal conductivity is nonpositive at theta = {theta}")
    return value


def coefficient_slopes(tc: ThermalCoefficients) -> Tuple[float, float]:
    """(dc/dtheta, dk/dtheta)"""
    span = tc.theta_i - tc.theta_o
    return tc.c_ref * tc.alpha / span, tc.k_ref * tc.beta / span


def coefficient_trends(delta: float, gamma: float) -> Dict[str, str]:
    """How heat capacity (sign of gamma) and conductivity (sign of delta) vary with temperature"""
    names = {1: "increasing", -1: "decreasing", 0: "constant"}
    return {
        "heat_capacity": names[sign(gamma)],
        "thermal_conductivity": names[sign(delta)],
    }


def phi_value(
    p: Params,
    lam: float,
    method: str,
    solver_options: Optional[SolverOptions] = None,
    shooting_options: Optional[ShootingOptions] = None,
) -> float:
    """Phi_{delta gamma}(lam) by the named method; 1 beyond the truncation point"""
    if method == "picard":
        sol = solve_phi(p, solver_options)
    elif method == "shooting":
        sol = shoot(p, shooting_options)
    else:
        raise ValueError(f"unknown method {method!r}")

    if lam >= sol.phi.grid.x_max:
        return 1.0
    return evaluate(sol.phi, lam)


def _auto_method(p: Params) -> str:
    return "picard" if contraction_constants(p).in_region else "shooting"


def _damped(old: float, new: float, name: str) -> float:
    """Halve the update towards old until it is back inside (-1, inf)"""
    for _ in range(STEFAN_MAX_DAMPINGS):
        if 1.0 + new >= PARAM_FLOOR:
            return new
        print(f"[STEFAN] ⚠️ {name} update {new:.6g} overshoots past -1, damping")
        new = old + STEFAN_DAMPING * (new - old)
    raise InfeasibleParametersError(f"{name} iterate leaves (−1,∞)")


def solve_phase_parameters(
    alpha: float,
    beta: float,
    lam: float,
    tol: float = STEFAN_DEFAULT_TOL,
    max_sweeps: int = STEFAN_MAX_SWEEPS,
    solver_options: Optional[SolverOptions] = None,
    shooting_options: Optional[ShootingOptions] = None,
) -> StefanPhaseParams:
    """Solve gamma * Phi(lam) = alpha, delta * Phi(lam) = beta for (delta, gamma)

    Sweeps delta <- beta/Phi(lam), gamma <- alpha/Phi(lam) from (beta, alpha),
    re-solving Phi from scratch every sweep (picard inside the region,
    shooting outside).
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if 1.0 + beta < PARAM_FLOOR or 1.0 + alpha < PARAM_FLOOR:
        raise InfeasibleParametersError("starting point (beta, alpha) leaves (−1,∞)")

    delta, gamma = float(beta), float(alpha)
    residuals = (float("inf"), float("inf"))

    for sweep in range(1, max_sweeps + 1):
        p = Params(delta, gamma)
        method = _auto_method(p)
        phi_lambda = phi_value(p, lam, method, solver_options, shooting_options)
        residuals = (abs(gamma * phi_lambda - alpha), abs(delta * phi_lambda - beta))

        if config.VERBOSE:
            print(f"[STEFAN] sweep {sweep}: delta={delta:.12g} gamma={gamma:.12g} "
                  f"phi={phi_lambda:.12g} residuals={residuals[0]:.2e},{residuals[1]:.2e}")

        if residuals[0] <= tol and residuals[1] <= tol:
            if (alpha != 0 and sign(gamma) != sign(alpha)) or (beta != 0 and sign(delta) != sign(beta)):
                raise ValueError("sign(gamma) = sign(alpha) and sign(delta) = sign(beta) violated")
            return StefanPhaseParams(
                alpha=alpha,
                beta=beta,
                lambda_=lam,
                delta=delta,
                gamma=gamma,
                phi_at_lambda=phi_lambda,
                method=method,
                sweeps=sweep,
                residual_alpha=residuals[0],
                residual_beta=residuals[1],
            )

        delta = _damped(delta, beta / phi_lambda, "delta")
        gamma = _damped(gamma, alpha / phi_lambda, "gamma")

    print(f"[STEFAN] ❌ no convergence after {max_sweeps} sweeps")
    raise StefanConvergenceError(
        f"consistency sweep did not converge in {max_sweeps} sweeps "
        f"(residuals {residuals[0]:.3e}, {residuals[1]:.3e})",
        delta=delta,
        gamma=gamma,
        residuals=residuals,
        sweeps=max_sweeps,
    )


def phase_params_from_coefficients(
    tc: ThermalCoefficients,
    lam: float,
    tol: float = STEFAN_DEFAULT_TOL,
    max_sweeps: int = STEFAN_MAX_SWEEPS,
    solver_options: Optional[SolverOptions] = None,
    shooting_options: Optional[ShootingOptions] = None,
) -> StefanPhaseParams:
    """Run the consistency solve for the slopes carried by a solidification setup"""
    if not tc.is_solidification():
        raise ValueError("solidification needs theta_o < theta_i")
    return solve_phase_parameters(tc.alpha, tc.beta, lam, tol, max_sweeps, solver_options, shooting_options)
