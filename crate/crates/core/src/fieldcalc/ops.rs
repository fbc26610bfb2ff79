use num_complex::Complex64;

use super::{Grid, ScalarField, Spectrum, VectorField};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn forward3(v: &VectorField) -> [Spectrum; 3] {
    let [x, y, z] = v.components();
    [
        Spectrum::forward(x),
        Spectrum::forward(y),
        Spectrum::forward(z),
    ]
}

/// Combines three spectra mode by mode into one.
fn combine(
    grid: &Grid,
    specs: &[&Spectrum],
    f: impl Fn([usize; 3], &[Complex64]) -> Complex64,
) -> Spectrum {
    let mut buf = vec![Complex64::default(); specs.len()];
    let coeffs = (0..grid.len())
        .map(|idx| {
            for (b, s) in buf.iter_mut().zip(specs) {
                *b = s.coeffs()[idx];
            }
            f(grid.unravel(idx), &buf)
        })
        .collect();
    Spectrum::from_coeffs(*grid, coeffs)
}

/// Spectral gradient.
pub fn gradient(s: &ScalarField) -> VectorField {
    let kd = s.grid().derivative_wavenumbers();
    let spec = Spectrum::forward(s);
    VectorField::from_components([0, 1, 2].map(|a| spec.map_modes(|m| I * kd[m[a]]).to_field()))
}

/// Spectral divergence.
pub fn divergence(v: &VectorField) -> ScalarField {
    let grid = *v.grid();
    let kd = grid.derivative_wavenumbers();
    let [sx, sy, sz] = forward3(v);
    combine(&grid, &[&sx, &sy, &sz], |m, c| {
        I * (kd[m[0]] * c[0] + kd[m[1]] * c[1] + kd[m[2]] * c[2])
    })
    .to_field()
}

/// Spectral curl.
pub fn curl(v: &VectorField) -> VectorField {
    let grid = *v.grid();
    let kd = grid.derivative_wavenumbers();
    let [sx, sy, sz] = forward3(v);
    let specs = [&sx, &sy, &sz];
    let cx = combine(&grid, &specs, |m, c| {
        I * (kd[m[1]] * c[2] - kd[m[2]] * c[1])
    });
    let cy = combine(&grid, &specs, |m, c| {
        I * (kd[m[2]] * c[0] - kd[m[0]] * c[2])
    });
    let cz = combine(&grid, &specs, |m, c| {
        I * (kd[m[0]] * c[1] - kd[m[1]] * c[0])
    });
    VectorField::from_components([cx.to_field(), cy.to_field(), cz.to_field()])
}

fn minus_k_squared(grid: &Grid) -> impl Fn([usize; 3]) -> Complex64 {
    let k = grid.wavenumbers();
    move |m| Complex64::new(-(k[m[0]].powi(2) + k[m[1]].powi(2) + k[m[2]].powi(2)), 0.0)
}

pub fn scalar_laplacian(s: &ScalarField) -> ScalarField {
    Spectrum::forward(s)
        .map_modes(minus_k_squared(s.grid()))
        .to_field()
}

/// Componentwise Cartesian Laplacian.
pub fn laplacian(v: &VectorField) -> VectorField {
    v.map_components(scalar_laplacian)
}

/// Solves `∇²p = rhs` on the periodic box; the mean of `rhs` is discarded and
/// the result has zero mean.
pub fn solve_poisson(rhs: &ScalarField) -> ScalarField {
    let k = rhs.grid().wavenumbers();
    Spectrum::forward(rhs)
        .map_modes(|m| {
            let k2 = k[m[0]].powi(2) + k[m[1]].powi(2) + k[m[2]].powi(2);
            if k2 == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(-1.0 / k2, 0.0)
            }
        })
        .to_field()
}

/// Spectral Leray projection onto the divergence-free subspace.
pub fn leray_project(v: &VectorField) -> VectorField {
    let grid = *v.grid();
    let kd = grid.derivative_wavenumbers();
    let [sx, sy, sz] = forward3(v);
    let specs = [&sx, &sy, &sz];
    let project = |axis: usize| {
        combine(&grid, &specs, |m, c| {
            let kv = [kd[m[0]], kd[m[1]], kd[m[2]]];
            let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
            if k2 == 0.0 {
                return c[axis];
            }
            let kdotv = kv[0] * c[0] + kv[1] * c[1] + kv[2] * c[2];
            c[axis] - kdotv * (kv[axis] / k2)
        })
        .to_field()
    };
    VectorField::from_components([project(0), project(1), project(2)])
}

/// Zeroes every mode with some `|m| > (n-1)/3` (the 2/3 rule).
pub fn dealias(s: &ScalarField) -> ScalarField {
    let grid = *s.grid();
    let cut = grid.dealias_cutoff();
    Spectrum::forward(s)
        .map_modes(|m| {
            if m.iter().all(|&i| grid.mode(i).abs() <= cut) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        })
        .to_field()
}

fn dealias_vector(v: &VectorField) -> VectorField {
    v.map_components(dealias)
}

/// `a · b` with both factors and the product truncated by the 2/3 rule.
pub fn product_dealiased(a: &ScalarField, b: &ScalarField) -> ScalarField {
    dealias(&dealias(a).mul(&dealias(b)))
}

/// Pointwise cross product.
pub fn cross(a: &VectorField, b: &VectorField) -> VectorField {
    let [ax, ay, az] = a.components();
    let [bx, by, bz] = b.components();
    VectorField::from_components([
        ay.mul(bz).sub(&az.mul(by)),
        az.mul(bx).sub(&ax.mul(bz)),
        ax.mul(by).sub(&ay.mul(bx)),
    ])
}

/// Pointwise dot product.
pub fn dot(a: &VectorField, b: &VectorField) -> ScalarField {
    let [ax, ay, az] = a.components();
    let [bx, by, bz] = b.components();
    ax.mul(bx).add(&ay.mul(by)).add(&az.mul(bz))
}

/// Cross product with 2/3-rule truncation of factors and result.
pub fn cross_dealiased(a: &VectorField, b: &VectorField) -> VectorField {
    dealias_vector(&cross(&dealias_vector(a), &dealias_vector(b)))
}

/// Convective derivative `(u · ∇) v`, dealiased.
pub fn advect(u: &VectorField, v: &VectorField) -> VectorField {
    let ut = dealias_vector(u);
    let [ux, uy, uz] = ut.components();
    dealias_vector(&VectorField::from_components(
        dealias_vector(v).components().clone().map(|vc| {
            let g = gradient(&vc);
            let [gx, gy, gz] = g.components();
            ux.mul(gx).add(&uy.mul(gy)).add(&uz.mul(gz))
        }),
    ))
}

/// Max norm of `(u·∇)u − ∇(|u|²/2) + u × (∇ × u)`, all products dealiased.
pub fn lamb_form_residual(u: &VectorField) -> f64 {
    let ut = dealias_vector(u);
    let convective = advect(&ut, &ut);
    let half_sq = dealias(&dot(&ut, &ut)).scale(0.5);
    let bernoulli = gradient(&half_sq);
    let lamb = cross_dealiased(&ut, &curl(&ut));
    convective.sub(&bernoulli).add(&lamb).max_abs()
}
