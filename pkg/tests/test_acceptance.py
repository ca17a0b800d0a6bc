"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with ``-s`` to see them
all).  The criteria live in ``phypred.verification`` so the CLI ``verify``
command runs exactly the same checks.  The three end-to-end criteria train
real models and dominate the suite's runtime.
"""

import pytest

from phypred.verification import (
    criterion_ablation,
    criterion_blob_learning,
    criterion_determinism_persistence,
    criterion_fft_oracle,
    criterion_gradient_propagation,
    criterion_gradient_suite,
    criterion_h1_emphasis,
    criterion_integrator_order,
    criterion_moment_stencils,
    criterion_physics_learning,
    criterion_reduction_identity,
)


def _check(result):
    print()
    print(result.line())
    assert result.passed, result.detail


def test_criterion_01_fft_oracle():
    _check(criterion_fft_oracle())


def test_criterion_02_gradient_suite():
    _check(criterion_gradient_suite())


def test_criterion_03_moment_stencils():
    _check(criterion_moment_stencils())


def test_criterion_04_integrator_order():
    _check(criterion_integrator_order())


def test_criterion_05_reduction_identity():
    _check(criterion_reduction_identity())


def test_criterion_06_gradient_propagation():
    _check(criterion_gradient_propagation())


def test_criterion_07_h1_emphasis():
    _check(criterion_h1_emphasis())


def test_criterion_11_determinism_persistence():
    _check(criterion_determinism_persistence())


@pytest.mark.slow
def test_criterion_08_end_to_end_blobs(tmp_path):
    _check(criterion_blob_learning(workdir=tmp_path))


@pytest.mark.slow
def test_criterion_09_physics_learning(tmp_path):
    _check(criterion_physics_learning(workdir=tmp_path))


@pytest.mark.slow
def test_criterion_10_ablation_machinery():
    _check(criterion_ablation())
