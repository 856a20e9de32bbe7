# -*- coding: utf-8 -*-

import numpy as np
import pytest

from lipres.aam.fitting import AamFitter, fit, track
from lipres.aam.model import Aam, synthesize
from lipres.errors import FitError
from lipres.geometry.shape import Shape
from lipres.imaging.image import Image, Resolution

SIZE = Resolution(64, 52)


def _rms(a: Shape, b: Shape) -> float:
    return float(np.sqrt(np.mean(np.sum((a.points - b.points) ** 2, axis=1))))


class Tester:
    """Test Project-out Inverse Compositional Fitting."""

    def test_warp_jacobian(self, aam: Aam) -> None:
        """analytic Jacobian matches central differences"""
        fitter = AamFitter(aam)
        rng = np.random.default_rng(3)
        std = np.sqrt(aam.shape_model.eigenvalues)
        for _ in range(5):
            theta = np.concatenate(
                [rng.uniform(-0.05, 0.05, 2), rng.uniform(-2.0, 2.0, 2), rng.uniform(-0.5, 0.5, std.shape[0]) * std]
            )
            jac = fitter.warp_jacobian(theta)
            for k in range(fitter.n_params):
                step = np.zeros_like(theta)
                step[k] = 1e-5
                numeric = (fitter.warp_points(theta + step) - fitter.warp_points(theta - step)) / 2e-5
                assert np.allclose(jac[:, :, k], numeric, atol=1e-4)

    def test_params_round_trip(self, aam: Aam) -> None:
        """parameters survive a trip through the image-frame shape"""
        fitter = AamFitter(aam)
        std = np.sqrt(aam.shape_model.eigenvalues)
        theta = np.concatenate([[0.02, -0.01, 15.0, 12.0], 0.3 * std])
        back = fitter.params_from_shape(fitter.shape_from_params(theta))
        assert np.allclose(back, theta, atol=1e-6)

    def test_fit_exact_instance(self, aam: Aam) -> None:
        """a synthesised instance at an integer offset is recovered exactly"""
        q = np.array([0.0, 0.0, 18.0, 16.0])
        p = np.zeros(aam.shape_model.n_modes)
        lam = 0.5 * np.sqrt(aam.appearance_model.eigenvalues)
        image, shape = synthesize(aam, q, p, lam, SIZE, background=0.5)
        result = fit(aam, image, shape)
        assert result.converged
        assert np.allclose(result.shape_params, 0.0, atol=1e-6)
        assert np.allclose(result.similarity_params, q, atol=1e-6)
        assert np.allclose(result.appearance_params, lam, atol=1e-6)
        assert result.residual_rms < 1e-6
        assert _rms(result.fitted_shape, shape) < 1e-6

    def test_fit_from_offset(self, aam: Aam) -> None:
        """a displaced start moves back towards the true shape"""
        q = np.array([0.0, 0.0, 18.0, 16.0])
        p = np.zeros(aam.shape_model.n_modes)
        lam = np.zeros(aam.appearance_model.n_modes)
        image, shape = synthesize(aam, q, p, lam, SIZE, background=0.5)
        start = shape.translated(1.0, -0.8)
        result = AamFitter(aam).fit(image, start)
        assert result.history[-1] <= result.history[0]
        assert _rms(result.fitted_shape, shape) < _rms(start, shape)
        assert _rms(result.fitted_shape, shape) < 0.3

    def test_fit_blank_image(self, aam: Aam) -> None:
        """a featureless frame still returns a result"""
        q = np.array([0.0, 0.0, 18.0, 16.0])
        _, shape = synthesize(
            aam, q, np.zeros(aam.shape_model.n_modes), np.zeros(aam.appearance_model.n_modes), SIZE
        )
        result = AamFitter(aam).fit(Image.constant(SIZE, 0.5), shape, max_iters=5)
        assert np.isfinite(result.residual_rms)
        assert 1 <= result.iterations <= 5
        assert result.fitted_shape.n_points == shape.n_points

    def test_fit_outside(self, aam: Aam) -> None:
        """the initial shape must lie inside the frame"""
        shape = aam.reference_shape.translated(100.0, 0.0)
        with pytest.raises(FitError, match="outside"):
            AamFitter(aam).fit(Image.constant(SIZE, 0.5), shape)

    def test_track(self, aam: Aam) -> None:
        """each frame starts from the previous fit"""
        p = np.zeros(aam.shape_model.n_modes)
        lam = np.zeros(aam.appearance_model.n_modes)
        frames, shapes = [], []
        for tx in (18.0, 19.0, 20.0):
            image, shape = synthesize(aam, np.array([0.0, 0.0, tx, 16.0]), p, lam, SIZE, background=0.5)
            frames.append(image)
            shapes.append(shape)
        results = track(AamFitter(aam), frames, shapes[0])
        assert len(results) == 3
        assert _rms(results[0].fitted_shape, shapes[0]) < 1e-6
        assert _rms(results[-1].fitted_shape, shapes[-1]) < 0.3

    def test_fit_perturbed_trials(self, aam: Aam) -> None:
        """95 of 100 starts perturbed by 20% of each mode's std return to the truth"""
        rng = np.random.default_rng(2024)
        fitter = AamFitter(aam)
        std = np.sqrt(aam.shape_model.eigenvalues)
        lam_std = np.sqrt(aam.appearance_model.eigenvalues)
        p = np.zeros(aam.shape_model.n_modes)
        recovered = 0
        for _ in range(100):
            q = np.array([0.0, 0.0, float(rng.integers(17, 20)), float(rng.integers(15, 18))])
            lam = 0.2 * rng.standard_normal(lam_std.shape[0]) * lam_std
            image, _ = synthesize(aam, q, p, lam, SIZE, background=0.5)
            start = fitter.shape_from_params(np.concatenate([q, p + 0.2 * rng.choice([-1.0, 1.0], p.shape[0]) * std]))
            result = fitter.fit(image, start, max_iters=100, tol=1e-10)
            error = float(np.sqrt(np.mean(((result.shape_params - p) / std) ** 2)))
            if result.converged and error < 1e-3:
                recovered += 1
        assert recovered >= 95
