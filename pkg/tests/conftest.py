"""Shared fixtures; expensive solves are session-scoped and built lazily."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from holeopt import (Hole, PuncturedDomain, SmoothDomain, generate_domain_mesh,
                     generate_mesh, hole_flux, solve_lambda1)
from holeopt.verify import VerifyContext


@pytest.fixture(scope="session")
def ctx():
    """Verification context shared by unit tests and the acceptance suite."""
    return VerifyContext(seed=0)


@pytest.fixture(scope="session")
def disk():
    return SmoothDomain.disk(1.0)


@pytest.fixture(scope="session")
def ellipse():
    return SmoothDomain.ellipse(1.4, 1.0)


@pytest.fixture(scope="session")
def star():
    return SmoothDomain.fourier_star(1.0, [(2, 0.15)])


@pytest.fixture(scope="session")
def disk_solution(disk):
    """Unpunctured unit-disk solve at h = 0.04."""
    mesh = generate_domain_mesh(disk, 0.04, seed=0)
    return solve_lambda1(mesh)


@pytest.fixture(scope="session")
def ellipse_solution(ellipse):
    """Unpunctured ellipse solve at h = 0.03 (Hopf constant, barrier)."""
    mesh = generate_domain_mesh(ellipse, 0.03, seed=0)
    return solve_lambda1(mesh)


@pytest.fixture(scope="session")
def annulus_bundle(ctx):
    """Concentric disk/hole(0.3) fixture: (pd, solution, flux)."""
    return ctx.concentric_solution(delta=0.3, target_h=0.02, factor=4.0)


@pytest.fixture(scope="session")
def offcenter_bundle(disk):
    """disk(1) with hole((0.4, 0), 0.1) at h = 0.03: (pd, solution, flux)."""
    pd = PuncturedDomain(disk, Hole((0.4, 0.0), 0.1))
    mesh = generate_mesh(pd, 0.03, 8.0, seed=0)
    sol = solve_lambda1(mesh)
    flux = hole_flux(sol, center=pd.hole.center_array, radius=0.1)
    return pd, sol, flux


@pytest.fixture(scope="session")
def near_boundary_bundle(ctx):
    """Ellipse near-boundary fixture delta=0.05, clearance=0.5 delta^2."""
    return ctx.near_boundary_solution(0.05)


@pytest.fixture(scope="session")
def blowup_solution(ctx):
    """Harmonic solution on K_8 with linear truncation data (alpha = 1)."""
    return ctx.blowup_solution(R=8.0, alpha=1.0)


def rng(seed=0):
    return np.random.default_rng(seed)
