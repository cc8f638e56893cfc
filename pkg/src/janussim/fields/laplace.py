"""2D electrostatic Laplace solver for the inter-electrode gap.

Finite-volume 5-point discretization with red-black successive
over-relaxation. The bottom/top edges are Dirichlet electrodes, the side
walls zero-normal-flux. Inclusions are either excluded insulating regions
(zero-normal-flux on their staircase boundary) or floating conductors
carrying a single unknown potential fixed by zero net boundary flux.

Corner fields are reported at the nearest half-cell; no local refinement.
Quantities are SI (meters, volts).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FLUID, DIRICHLET, INSULATOR, CONDUCTOR = 0, 1, 2, 3


class NonConvergenceError(RuntimeError):
    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"SOR did not converge: residual {residual:.3e} after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class Inclusion:
    """Obstacle or particle inside the domain.

    ``rectangle``: x_center/width plus height measured from y_min upward.
    ``circle``: x_center/y_center/radius. Boundary 'insulating' and
    'dielectric_insulating' are numerically identical; 'floating_conductor'
    adds one unknown equipotential.
    """

    shape: str
    boundary: str = "insulating"
    x_center: float = 0.0
    y_center: float = 0.0
    width: float = 0.0
    height: float = 0.0
    radius: float = 0.0
    y_min: float = 0.0

    def __post_init__(self) -> None:
        if self.shape not in ("rectangle", "circle"):
            raise ValueError(f"unknown inclusion shape {self.shape!r}")
        if self.boundary not in ("insulating", "dielectric_insulating", "floating_conductor"):
            raise ValueError(f"unknown boundary kind {self.boundary!r}")
        if self.shape == "rectangle" and (self.width <= 0.0 or self.height <= 0.0):
            raise ValueError("rectangle inclusions need positive width and height")
        if self.shape == "circle" and self.radius <= 0.0:
            raise ValueError("circle inclusions need a positive radius")

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.shape == "rectangle":
            half = 0.5 * self.width
            return (
                (np.abs(x - self.x_center) <= half)
                & (y >= self.y_min)
                & (y <= self.y_min + self.height)
            )
        return (x - self.x_center) ** 2 + (y - self.y_center) ** 2 <= self.radius**2


@dataclass(frozen=True)
class DomainSpec2D:
    width: float
    height: float
    grid_nx: int
    grid_ny: int
    bottom_potential: float = 0.0
    top_potential: float = 7.5
    inclusions: tuple[Inclusion, ...] = ()

    def __post_init__(self) -> None:
        if self.width <= 0.0 or self.height <= 0.0:
            raise ValueError("domain dimensions must be positive")
        if self.grid_nx < 16 or self.grid_ny < 16:
            raise ValueError("grid must be at least 16x16")
        eps = 1e-12
        for inc in self.inclusions:
            if inc.shape == "rectangle":
                x0 = inc.x_center - 0.5 * inc.width
                x1 = inc.x_center + 0.5 * inc.width
                y0, y1 = inc.y_min, inc.y_min + inc.height
                if x0 < -eps or x1 > self.width + eps or y0 < -eps or y1 >= self.height:
                    raise ValueError("rectangle inclusion leaves the domain interior")
                if y0 > eps and inc.boundary == "floating_conductor" and y0 <= eps:
                    raise ValueError("floating conductors must be strictly interior")
            else:
                if not (
                    inc.radius < inc.x_center < self.width - inc.radius
                    and inc.radius < inc.y_center < self.height - inc.radius
                ):
                    raise ValueError("circle inclusion must be strictly interior")
        # pairwise overlap check on bounding boxes
        boxes = []
        for inc in self.inclusions:
            if inc.shape == "rectangle":
                boxes.append(
                    (
                        inc.x_center - 0.5 * inc.width,
                        inc.x_center + 0.5 * inc.width,
                        inc.y_min,
                        inc.y_min + inc.height,
                    )
                )
            else:
                boxes.append(
                    (
                        inc.x_center - inc.radius,
                        inc.x_center + inc.radius,
                        inc.y_center - inc.radius,
                        inc.y_center + inc.radius,
                    )
                )
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                a, b = boxes[i], boxes[j]
                if a[0] < b[1] and b[0] < a[1] and a[2] < b[3] and b[2] < a[3]:
                    raise ValueError("inclusions overlap")


@dataclass
class PotentialGrid:
    """Converged electrostatic solution with derived field maps.

    Arrays are indexed [iy, ix]; ``mask`` holds the node classification.
    ``e_mag``/gradients are zero inside excluded regions.
    """

    xs: np.ndarray
    ys: np.ndarray
    phi: np.ndarray
    mask: np.ndarray
    e_x: np.ndarray
    e_y: np.ndarray
    e_mag: np.ndarray
    grad_e_x: np.ndarray
    grad_e_y: np.ndarray
    grad_e2_x: np.ndarray
    grad_e2_y: np.ndarray
    grad_e2_mag: np.ndarray
    iterations: int
    residual: float
    tolerance: float
    floating_potentials: tuple[float, ...]
    domain: DomainSpec2D

    @property
    def dx(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @property
    def dy(self) -> float:
        return float(self.ys[1] - self.ys[0])

    def index_of(self, x: float, y: float) -> tuple[int, int]:
        ix = int(round(x / self.dx))
        iy = int(round(y / self.dy))
        return (
            min(max(iy, 0), len(self.ys) - 1),
            min(max(ix, 0), len(self.xs) - 1),
        )

    def value_at(self, arr: np.ndarray, x: float, y: float) -> float:
        """Bilinear interpolation of a node field at (x, y)."""
        fx = min(max(x / self.dx, 0.0), len(self.xs) - 1.000001)
        fy = min(max(y / self.dy, 0.0), len(self.ys) - 1.000001)
        ix, iy = int(fx), int(fy)
        tx, ty = fx - ix, fy - iy
        return float(
            arr[iy, ix] * (1 - tx) * (1 - ty)
            + arr[iy, ix + 1] * tx * (1 - ty)
            + arr[iy + 1, ix] * (1 - tx) * ty
            + arr[iy + 1, ix + 1] * tx * ty
        )

    def uniform_field_magnitude(self) -> float:
        return abs(self.domain.top_potential - self.domain.bottom_potential) / self.domain.height


def _classify(domain: DomainSpec2D) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[np.ndarray]]:
    xs = np.linspace(0.0, domain.width, domain.grid_nx)
    ys = np.linspace(0.0, domain.height, domain.grid_ny)
    xg, yg = np.meshgrid(xs, ys)
    mask = np.full((domain.grid_ny, domain.grid_nx), FLUID, dtype=np.int8)
    mask[0, :] = DIRICHLET
    mask[-1, :] = DIRICHLET
    conductor_regions: list[np.ndarray] = []
    for inc in domain.inclusions:
        inside = inc.contains(xg, yg)
        if inc.boundary == "floating_conductor":
            inside = inside & (mask == FLUID)
            mask[inside] = CONDUCTOR
            conductor_regions.append(inside)
        else:
            mask[inside] = INSULATOR
    return xs, ys, mask, conductor_regions


def _masked_gradient(
    arr: np.ndarray, valid: np.ndarray, dx: float, dy: float
) -> tuple[np.ndarray, np.ndarray]:
    """d/dx, d/dy with central differences, falling back to one-sided stencils
    at domain edges and next to excluded nodes."""
    ny, nx = arr.shape
    a = np.pad(arr, 1, mode="edge")
    v = np.pad(valid, 1, mode="constant", constant_values=False)
    c = a[1:-1, 1:-1]
    left, right = a[1:-1, :-2], a[1:-1, 2:]
    vl, vr = v[1:-1, :-2], v[1:-1, 2:]
    down, up = a[:-2, 1:-1], a[2:, 1:-1]
    vd, vu = v[:-2, 1:-1], v[2:, 1:-1]

    def axis(minus, vminus, plus, vplus, h):
        both = vminus & vplus
        out = np.zeros_like(arr)
        out = np.where(both, (plus - minus) / (2 * h), out)
        only_plus = vplus & ~vminus
        out = np.where(only_plus, (plus - c) / h, out)
        only_minus = vminus & ~vplus
        out = np.where(only_minus, (c - minus) / h, out)
        return out

    gx = axis(left, vl, right, vr, dx)
    gy = axis(down, vd, up, vu, dy)
    gx[~valid] = 0.0
    gy[~valid] = 0.0
    return gx, gy


def solve_laplace(
    domain: DomainSpec2D,
    tolerance: float = 1e-6,
    max_iters: int = 200_000,
    over_relaxation: float | None = None,
    check_every: int = 50,
) -> PotentialGrid:
    """Solve for the potential and derive |E|, grad|E| and grad|E|^2 maps.

    ``tolerance`` bounds the maximum Gauss-Seidel residual relative to the
    electrode potential span. Raises NonConvergenceError past ``max_iters``.
    """
    xs, ys, mask, conductor_regions = _classify(domain)
    ny, nx = mask.shape
    dx = xs[1] - xs[0]
    dy = ys[1] - ys[0]
    wx, wy = 1.0 / dx**2, 1.0 / dy**2
    span = abs(domain.top_potential - domain.bottom_potential) or 1.0

    phi = np.zeros((ny, nx))
    phi[-1, :] = domain.top_potential
    phi[0, :] = domain.bottom_potential
    # linear initial guess speeds convergence without affecting the fixed point
    ramp = domain.bottom_potential + (
        domain.top_potential - domain.bottom_potential
    ) * (ys / domain.height)
    interior = (mask != DIRICHLET).nonzero()
    phi[1:-1, :] = ramp[1:-1, None]
    phi[mask == INSULATOR] = 0.0

    conductor_potentials = [0.5 * (domain.top_potential + domain.bottom_potential)] * len(
        conductor_regions
    )
    for region, pot in zip(conductor_regions, conductor_potentials):
        phi[region] = pot

    # face weights; 0 toward out-of-domain or insulator neighbors
    padded_ok = np.pad(mask != INSULATOR, 1, mode="constant", constant_values=False)
    w_up = wy * padded_ok[2:, 1:-1]
    w_dn = wy * padded_ok[:-2, 1:-1]
    w_rt = wx * padded_ok[1:-1, 2:]
    w_lf = wx * padded_ok[1:-1, :-2]
    denom = w_up + w_dn + w_rt + w_lf

    active = mask == FLUID
    if not active.any():
        raise ValueError("no fluid nodes to solve for")
    if (denom[active] == 0.0).any():
        raise ValueError("isolated fluid node: inclusion geometry seals a region")

    iy, ix = np.indices((ny, nx))
    red = active & ((ix + iy) % 2 == 0)
    black = active & ((ix + iy) % 2 == 1)

    if over_relaxation is None:
        n = max(nx, ny)
        over_relaxation = 2.0 / (1.0 + math.sin(math.pi / n))
    omega = over_relaxation

    # conductor adjacency: fluid faces feeding each floating region
    conductor_faces = []
    for region in conductor_regions:
        pr = np.pad(region, 1, mode="constant", constant_values=False)
        faces = []
        for shift, w in (((2, 1), wy), ((0, 1), wy), ((1, 2), wx), ((1, 0), wx)):
            sy, sx = shift
            neighbor_is_cond = pr[sy : sy + ny, sx : sx + nx]
            contributors = active & neighbor_is_cond
            faces.append((contributors, w))
        conductor_faces.append(faces)

    def sweep(color_mask: np.ndarray) -> None:
        p = np.pad(phi, 1, mode="constant")
        num = (
            w_up * p[2:, 1:-1]
            + w_dn * p[:-2, 1:-1]
            + w_rt * p[1:-1, 2:]
            + w_lf * p[1:-1, :-2]
        )
        gs = np.divide(num, denom, out=np.zeros_like(num), where=denom > 0)
        phi[color_mask] += omega * (gs[color_mask] - phi[color_mask])

    def residual_now() -> float:
        p = np.pad(phi, 1, mode="constant")
        num = (
            w_up * p[2:, 1:-1]
            + w_dn * p[:-2, 1:-1]
            + w_rt * p[1:-1, 2:]
            + w_lf * p[1:-1, :-2]
        )
        gs = np.divide(num, denom, out=np.zeros_like(num), where=denom > 0)
        return float(np.max(np.abs(gs[active] - phi[active]))) / span

    iterations = 0
    res = math.inf
    while iterations < max_iters:
        sweep(red)
        sweep(black)
        # zero-net-flux update of each floating conductor potential
        for k, faces in enumerate(conductor_faces):
            acc = 0.0
            wsum = 0.0
            for contributors, w in faces:
                acc += w * float(phi[contributors].sum())
                wsum += w * int(contributors.sum())
            if wsum > 0.0:
                new_pot = acc / wsum
                conductor_potentials[k] = new_pot
                phi[conductor_regions[k]] = new_pot
        iterations += 1
        if iterations % check_every == 0 or iterations == max_iters:
            res = residual_now()
            if res < tolerance:
                break
    else:
        pass
    if res >= tolerance:
        res = residual_now()
        if res >= tolerance:
            raise NonConvergenceError(res, iterations)

    valid = mask != INSULATOR
    gx, gy = _masked_gradient(phi, valid, dx, dy)
    e_x, e_y = -gx, -gy
    # field inside a conductor is zero; staircase differencing leaves noise there
    for region in conductor_regions:
        e_x[region] = 0.0
        e_y[region] = 0.0
    e_mag = np.hypot(e_x, e_y)
    ge_x, ge_y = _masked_gradient(e_mag, valid, dx, dy)
    e2 = e_mag**2
    g2x, g2y = _masked_gradient(e2, valid, dx, dy)

    return PotentialGrid(
        xs=xs,
        ys=ys,
        phi=phi,
        mask=mask,
        e_x=e_x,
        e_y=e_y,
        e_mag=e_mag,
        grad_e_x=ge_x,
        grad_e_y=ge_y,
        grad_e2_x=g2x,
        grad_e2_y=g2y,
        grad_e2_mag=np.hypot(g2x, g2y),
        iterations=iterations,
        residual=res,
        tolerance=tolerance,
        floating_potentials=tuple(conductor_potentials),
        domain=domain,
    )


def dep_force_map(
    grid: PotentialGrid, dep_sign: int, coefficient: float
) -> tuple[np.ndarray, np.ndarray]:
    """Dielectrophoretic force field F = sign * c * grad(|E|^2).

    Positive sign points toward field maxima (positive DEP).
    """
    if dep_sign not in (1, -1):
        raise ValueError("dep_sign must be +1 or -1")
    return (
        dep_sign * coefficient * grid.grad_e2_x,
        dep_sign * coefficient * grid.grad_e2_y,
    )


def ceiling_holding_profile(
    grid: PotentialGrid, y_probe: float
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized holding strength |E(x, y_probe)|^2 / |E_uniform|^2 along x.

    ~1 far from inclusions, < 1 where an obstacle below weakens the field.
    """
    if not (0.0 <= y_probe <= grid.domain.height):
        raise ValueError("y_probe outside the domain")
    iy = min(max(int(round(y_probe / grid.dy)), 0), len(grid.ys) - 1)
    e0 = grid.uniform_field_magnitude()
    return grid.xs.copy(), (grid.e_mag[iy, :] / e0) ** 2
