# -*- coding: utf-8 -*-

"""Project-out Inverse Compositional Fitting.

Parameters are the similarity `q = (a, b, tx, ty)` about the reference
centroid followed by the shape parameters `p`. The steepest-descent images
and the Hessian are computed once per model on the mean appearance; every
iteration samples the image under the current warp, solves for an update and
composes its inverse into the current warp.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from loguru._logger import Logger

from ..errors import FitError, MeshError, ShapeError
from ..geometry.shape import Shape, SimilarityTransform
from ..imaging.image import Image
from .model import Aam, fill_outside, similarity_apply, similarity_matrix, similarity_params

__all__ = (
    "AamFitter",
    "FitResult",
    "fit",
    "track",
)

MAX_CONDITION = 1e12
STEPS = (1.0, 0.5, 0.25, 0.125)


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of fitting one frame."""

    shape_params: np.ndarray
    appearance_params: np.ndarray
    similarity_params: np.ndarray
    fitted_shape: Shape
    residual_rms: float
    converged: bool
    iterations: int
    history: tuple[float, ...] = ()


class AamFitter:
    """Precomputed project-out inverse compositional fitter of one model."""

    _logger: Optional[Logger]

    def __init__(self, aam: Aam, logger: Optional[Logger] = None) -> None:
        """Init AamFitter.

        Parameters:
            :aam:Aam, the model to fit;
            :logger:Logger from `loguru` library, optional;
        """
        self._aam = aam
        self._logger = logger
        self._warp = aam.warp
        self._base = aam.reference_shape.points
        self._centre = aam.reference_shape.centroid()
        self._basis = aam.shape_basis
        self._n_shape = aam.shape_model.n_modes
        n = self._base.shape[0]
        self._basis_flat = self._basis.reshape(2 * n, self._n_shape)
        self._basis_at_mask = self._warp.interpolate(self._basis.reshape(n, 2 * self._n_shape)).reshape(
            -1, 2, self._n_shape
        )
        self._template = aam.appearance_model.mean
        self._inv_base, self._tri = self._triangle_tables()

        grad_x, grad_y = self._template_gradients()
        jacobian = self.warp_jacobian(np.zeros(self.n_params))
        sd = grad_x[:, None] * jacobian[:, 0, :] + grad_y[:, None] * jacobian[:, 1, :]
        self._sd = aam.appearance_model.project_out(sd)
        hessian = self._sd.T @ self._sd
        condition = float(np.linalg.cond(hessian))
        if not np.isfinite(condition) or condition > MAX_CONDITION:
            raise FitError(f"singular Hessian, condition number {condition:.3g}")
        self._update = scipy.linalg.solve(hessian, self._sd.T, assume_a="pos")

        if self._logger:
            self._logger.debug(
                "fitter ready: {} mask pixels, {} parameters, Hessian condition {:.3g}",
                self._warp.n_pixels,
                self.n_params,
                condition,
            )

    @property
    def n_params(self) -> int:
        return 4 + self._n_shape

    def _template_gradients(self) -> tuple[np.ndarray, np.ndarray]:
        """Gradient of the mean appearance, outside pixels filled by their nearest neighbour."""
        image = fill_outside(self._warp.to_image(self._template), self._warp.mask_image())
        grad_y, grad_x = np.gradient(image)
        mask = self._warp.mask
        return grad_x[mask[:, 1], mask[:, 0]], grad_y[mask[:, 1], mask[:, 0]]

    def _triangle_tables(self) -> tuple[np.ndarray, np.ndarray]:
        tri = self._aam.triangulation.triangles
        corners = np.ones((len(tri), 3, 3))
        corners[:, :2, :] = self._base[tri].transpose(0, 2, 1)
        return np.linalg.inv(corners), tri

    def _local(self, theta: np.ndarray) -> np.ndarray:
        return self._base + self._basis @ theta[4:]

    def shape_from_params(self, theta: np.ndarray) -> Shape:
        """Image-frame shape of the parameter vector."""
        return Shape(similarity_apply(theta[:4], self._local(theta), self._centre))

    def params_from_shape(self, shape: Shape, rounds: int = 3) -> np.ndarray:
        """Parameter vector whose shape best matches `shape`."""
        p = np.zeros(self._n_shape)
        scale2 = self._aam.reference_scale**2
        q = np.zeros(4)
        for _ in range(rounds):
            local = self._base + self._basis @ p
            try:
                transform = SimilarityTransform.estimate(Shape(local), shape)
            except ShapeError as error:
                raise FitError(f"cannot place shape: {error}") from error
            q = similarity_params(transform, self._centre)
            back = transform.inverse().apply_points(shape.points)
            p = self._basis_flat.T @ (back - self._base).reshape(-1) / scale2
        return np.concatenate([q, p])

    def warp_points(self, theta: np.ndarray) -> np.ndarray:
        """Image positions of every mask pixel under the warp `theta`."""
        positions = self._warp.interpolate(self._local(theta))
        return similarity_apply(theta[:4], positions, self._centre)

    def warp_jacobian(self, theta: np.ndarray) -> np.ndarray:
        """d warp_points / d theta, (pixels, 2, parameters)."""
        d = self._warp.interpolate(self._local(theta)) - self._centre
        m = d.shape[0]
        jac = np.zeros((m, 2, self.n_params))
        jac[:, :, 0] = d
        jac[:, 0, 1] = -d[:, 1]
        jac[:, 1, 1] = d[:, 0]
        jac[:, 0, 2] = 1.0
        jac[:, 1, 3] = 1.0
        matrix = similarity_matrix(theta[:4])
        jac[:, :, 4:] = np.einsum("ij,mjs->mis", matrix, self._basis_at_mask)
        return jac

    def sample(self, image: Image, theta: np.ndarray) -> np.ndarray:
        """Texture of `image` under the warp `theta`."""
        shape = self.shape_from_params(theta)
        return self._warp.sample(image, shape).values

    def _residual(self, image: Image, theta: np.ndarray) -> tuple[np.ndarray, float]:
        error = self.sample(image, theta) - self._template
        projected = self._aam.appearance_model.project_out(error[:, None])[:, 0]
        return projected, float(np.linalg.norm(projected) / np.sqrt(projected.shape[0]))

    def _compose(self, theta: np.ndarray, delta: np.ndarray) -> np.ndarray:
        """theta composed with the inverse of the increment `delta`."""
        inverse = similarity_apply(-delta[:4], self._base + self._basis @ (-delta[4:]), self._centre)
        current = self.shape_from_params(theta).points
        # affine map of every triangle from the reference mesh to the current shape
        maps = current[self._tri].transpose(0, 2, 1) @ self._inv_base
        moved = np.zeros_like(current)
        counts = np.zeros(current.shape[0])
        for slot in range(3):
            vertex = self._tri[:, slot]
            homog = np.column_stack([inverse[vertex], np.ones(len(vertex))])
            np.add.at(moved, vertex, np.einsum("tij,tj->ti", maps, homog))
            np.add.at(counts, vertex, 1.0)
        return self.params_from_shape(Shape(moved / counts[:, None]))

    def fit(
        self,
        image: Image,
        init_shape: Shape,
        max_iters: int = 50,
        tol: float = 1e-6,
    ) -> FitResult:
        """Fit the model to `image` starting from `init_shape` (image frame).

        Stops when the RMS parameter update drops below `tol` (converged) or
        when `max_iters` is reached or no step size lowers the residual
        (not converged).
        """
        shape = self._aam.select(init_shape)
        if not shape.within(image.width, image.height):
            raise FitError(f"initial shape lies outside the {image.resolution} frame")

        theta = self.params_from_shape(shape)
        error, rms = self._residual(image, theta)
        history = [rms]
        converged = False
        iterations = 0
        for iterations in range(1, max_iters + 1):
            delta = self._update @ error
            if float(np.sqrt(np.mean(delta**2))) < tol:
                converged = True
                break
            accepted = False
            for step in STEPS:
                try:
                    candidate = self._compose(theta, step * delta)
                    cand_error, cand_rms = self._residual(image, candidate)
                except (MeshError, FitError, ShapeError):
                    continue
                if cand_rms <= rms + 1e-12:
                    theta, error, rms = candidate, cand_error, cand_rms
                    history.append(rms)
                    accepted = True
                    break
            if not accepted:
                break

        texture = self.sample(image, theta)
        return FitResult(
            shape_params=theta[4:].copy(),
            appearance_params=self._aam.appearance_model.project(texture),
            similarity_params=theta[:4].copy(),
            fitted_shape=self.shape_from_params(theta),
            residual_rms=rms,
            converged=converged,
            iterations=iterations,
            history=tuple(history),
        )


@lru_cache(maxsize=8)
def _fitter(aam: Aam) -> AamFitter:
    return AamFitter(aam)


def fit(
    aam: Aam,
    image: Image,
    init_shape: Shape,
    max_iters: int = 50,
    tol: float = 1e-6,
) -> FitResult:
    """Fit `aam` to `image` from `init_shape`, see `AamFitter.fit`."""
    return _fitter(aam).fit(image, init_shape, max_iters=max_iters, tol=tol)


def track(
    fitter: AamFitter,
    frames: Sequence[Image],
    init_shape: Shape,
    max_iters: int = 50,
    tol: float = 1e-6,
) -> list[FitResult]:
    """Fit consecutive frames, each initialised from the previous fitted shape."""
    results: list[FitResult] = []
    shape = init_shape
    for image in frames:
        result = fitter.fit(image, shape, max_iters=max_iters, tol=tol)
        results.append(result)
        if result.fitted_shape.within(image.width, image.height):
            shape = result.fitted_shape
    return results
