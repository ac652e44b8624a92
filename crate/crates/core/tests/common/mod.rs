//! Independent oracles shared by the integration tests. Nothing here goes
//! through the library's subspace or quotient machinery: ranks come from
//! plain Gaussian elimination and quotient norms from direct minimization.

#![allow(dead_code)]

use ljb::linalg::{self, CMat, C64};
use ljb::MatrixSubspace;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real combination of the basis of `s`.
pub fn random_in(s: &MatrixSubspace, rng: &mut ChaCha8Rng) -> CMat {
    let n = s.n();
    let mut out = CMat::zeros(n, n);
    for b in s.basis() {
        let g: f64 = StandardNormal.sample(rng);
        out += b * C64::new(g, 0.0);
    }
    out
}

/// Row-major real coordinates `(re, im)` of every entry.
pub fn real_coords(m: &CMat) -> Vec<f64> {
    let mut v = Vec::with_capacity(2 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v.push(m[(i, j)].re);
            v.push(m[(i, j)].im);
        }
    }
    v
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn gauss_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())) else {
            break;
        };
        if a[p][c].abs() <= tol {
            continue;
        }
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank {
                let f = a[r][c] / a[rank][c];
                if f != 0.0 {
                    for k in c..cols {
                        a[r][k] -= f * a[rank][k];
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn span_rank(mats: &[CMat]) -> usize {
    let rows: Vec<Vec<f64>> = mats.iter().map(real_coords).collect();
    gauss_rank(&rows, 1e-9)
}

/// `inf_k ‖a + k‖` over the real span of `ks`, by minimizing the smoothed norm
/// `t log Σ 2 cosh(λ_i / t)` with BFGS while `t` shrinks, from `restarts`
/// random starting points. Returns the smallest operator norm seen.
pub fn inf_norm_oracle(a: &CMat, ks: &[CMat], restarts: usize, seed: u64) -> f64 {
    let a = linalg::hermitian_part(a);
    let ks: Vec<CMat> = ks.iter().map(linalg::hermitian_part).collect();
    let op = |c: &[f64]| eig_norm(&combine(&a, &ks, c));
    let mut best = op(&vec![0.0; ks.len()]);
    if ks.is_empty() {
        return best;
    }
    let mut r = rng(seed);
    let scale = best.max(1e-3);
    for attempt in 0..restarts {
        let mut x: Vec<f64> = if attempt == 0 {
            vec![0.0; ks.len()]
        } else {
            (0..ks.len())
                .map(|_| {
                    let g: f64 = StandardNormal.sample(&mut r);
                    scale * g
                })
                .collect()
        };
        let mut t = scale;
        while t > 1e-10 * scale {
            x = bfgs(&a, &ks, t, x, 200);
            best = best.min(op(&x));
            t *= 0.1;
        }
    }
    best
}

/// Same infimum by cyclic coordinate descent: each coefficient in turn is set
/// to the minimizer of the convex one-dimensional restriction, found by
/// golden-section search. Restarted from `restarts` random points.
pub fn coordinate_descent_oracle(a: &CMat, ks: &[CMat], restarts: usize, seed: u64) -> f64 {
    let a = linalg::hermitian_part(a);
    let ks: Vec<CMat> = ks.iter().map(linalg::hermitian_part).collect();
    let op = |c: &[f64]| eig_norm(&combine(&a, &ks, c));
    let mut best = op(&vec![0.0; ks.len()]);
    if ks.is_empty() {
        return best;
    }
    let scale = best.max(1e-3);
    let mut r = rng(seed);
    for _ in 0..restarts {
        let mut x: Vec<f64> = (0..ks.len())
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut r);
                scale * g
            })
            .collect();
        let mut value = op(&x);
        for _sweep in 0..100 {
            let before = value;
            for i in 0..x.len() {
                let mut probe = x.clone();
                let mut along = |s: f64| {
                    probe[i] = s;
                    op(&probe)
                };
                let (s, v) = golden(&mut along, x[i] - 8.0 * scale, x[i] + 8.0 * scale);
                if v < value {
                    x[i] = s;
                    value = v;
                }
            }
            if before - value <= 1e-13 * scale {
                break;
            }
        }
        best = best.min(value);
    }
    best
}

fn golden(f: &mut impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn combine(a: &CMat, ks: &[CMat], c: &[f64]) -> CMat {
    let mut x = a.clone();
    for (k, ci) in ks.iter().zip(c) {
        x += k * C64::new(*ci, 0.0);
    }
    x
}

fn eig_norm(x: &CMat) -> f64 {
    let (vals, _) = linalg::eigh(x);
    vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Smoothed norm and its gradient in the coordinates of `ks`.
fn smoothed(a: &CMat, ks: &[CMat], t: f64, c: &[f64]) -> (f64, Vec<f64>) {
    let x = combine(a, ks, c);
    let (vals, vecs) = linalg::eigh(&x);
    let m = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut z = 0.0;
    let mut w = Vec::with_capacity(vals.len());
    for v in &vals {
        let (p, q) = (((v - m) / t).exp(), ((-v - m) / t).exp());
        z += p + q;
        w.push(p - q);
    }
    let value = m + t * z.ln();
    let mut g = CMat::zeros(x.nrows(), x.ncols());
    for (i, wi) in w.iter().enumerate() {
        let u = vecs.column(i);
        g += (u * u.adjoint()) * C64::new(wi / z, 0.0);
    }
    let grad = ks.iter().map(|k| linalg::re_trace_product(&g, k)).collect();
    (value, grad)
}

fn bfgs(a: &CMat, ks: &[CMat], t: f64, mut x: Vec<f64>, iters: usize) -> Vec<f64> {
    let d = x.len();
    let mut h = vec![vec![0.0; d]; d];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = t;
    }
    let (mut f, mut g) = smoothed(a, ks, t, &x);
    for _ in 0..iters {
        let p: Vec<f64> = (0..d).map(|i| -(0..d).map(|j| h[i][j] * g[j]).sum::<f64>()).collect();
        let slope: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope >= 0.0 || slope.abs() < 1e-300 {
            break;
        }
        let mut step = 1.0;
        let (xn, fn_, gn) = loop {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let (fv, gv) = smoothed(a, ks, t, &xn);
            if fv <= f + 1e-4 * step * slope || step < 1e-12 {
                break (xn, fv, gv);
            }
            step *= 0.5;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let done = (f - fn_).abs() <= 1e-15 * f.abs().max(1.0);
        x = xn;
        f = fn_;
        g = gn;
        if done {
            break;
        }
        if sy > 1e-300 {
            let hy: Vec<f64> = (0..d).map(|i| (0..d).map(|j| h[i][j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..d {
                for j in 0..d {
                    h[i][j] += (sy + yhy) * s[i] * s[j] / (sy * sy) - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                }
            }
        }
    }
    x
}

/// Dimensions of the constrained example `F = M2`, `C = {E11}` computed by
/// dense enumeration over real coordinates.
#[derive(Debug, PartialEq, Eq)]
pub struct Ex1Oracle {
    pub d_dim: usize,
    pub o_dim: usize,
    pub quotient_dim: usize,
    pub dirac_states: usize,
    pub reduced_ljb_dim: usize,
}

fn real_basis(n: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            out.push(linalg::unit(n, i, j));
            out.push(linalg::unit(n, i, j) * linalg::I);
        }
    }
    out
}

fn herm_basis(n: usize) -> Vec<CMat> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(linalg::unit(n, i, i));
        for j in i + 1..n {
            out.push(linalg::unit(n, i, j) + linalg::unit(n, j, i));
            out.push((linalg::unit(n, i, j) - linalg::unit(n, j, i)) * linalg::I);
        }
    }
    out
}

/// Kernel of the real matrix with the given columns, by reduced row echelon
/// form.
pub fn kernel(cols: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let d = cols.len();
    let m = cols.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<f64>> = (0..m).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..d {
        let Some(p) = (row..m).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())) else {
            break;
        };
        if a[p][c].abs() <= tol {
            continue;
        }
        a.swap(row, p);
        let piv = a[row][c];
        for v in a[row].iter_mut() {
            *v /= piv;
        }
        for r in 0..m {
            if r != row && a[r][c] != 0.0 {
                let f = a[r][c];
                for k in 0..d {
                    a[r][k] -= f * a[row][k];
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    (0..d)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0.0; d];
            v[free] = 1.0;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][free];
            }
            v
        })
        .collect()
}

fn lincomb(mats: &[CMat], c: &[f64]) -> CMat {
    let n = mats[0].nrows();
    let mut out = CMat::zeros(n, n);
    for (m, ci) in mats.iter().zip(c) {
        out += m * C64::new(*ci, 0.0);
    }
    out
}

/// Real basis of `span(a) ∩ span(b)`.
pub fn intersection(a: &[CMat], b: &[CMat]) -> Vec<CMat> {
    let cols: Vec<Vec<f64>> = a
        .iter()
        .map(real_coords)
        .chain(b.iter().map(|x| real_coords(x).iter().map(|v| -v).collect()))
        .collect();
    let vecs: Vec<CMat> = kernel(&cols, 1e-9).iter().map(|k| lincomb(a, &k[..a.len()])).collect();
    independent(&vecs)
}

/// Real basis of `{x ∈ span(cands) : every image f(x) lies in span(target)}`.
pub fn preimage(cands: &[CMat], target: &[CMat], f: impl Fn(&CMat) -> Vec<CMat>) -> Vec<CMat> {
    let images: Vec<Vec<CMat>> = cands.iter().map(&f).collect();
    let blocks = images.first().map_or(0, Vec::len);
    let mut cols: Vec<Vec<f64>> = images.iter().map(|imgs| imgs.iter().flat_map(real_coords).collect()).collect();
    for b in 0..blocks {
        for t in target {
            let coords = real_coords(t);
            let mut col = vec![0.0; blocks * coords.len()];
            col[b * coords.len()..(b + 1) * coords.len()].copy_from_slice(&coords);
            cols.push(col);
        }
    }
    let vecs: Vec<CMat> = kernel(&cols, 1e-9).iter().map(|k| lincomb(cands, &k[..cands.len()])).collect();
    independent(&vecs)
}

fn independent(mats: &[CMat]) -> Vec<CMat> {
    let mut out: Vec<CMat> = Vec::new();
    for m in mats {
        let mut trial = out.clone();
        trial.push(m.clone());
        if span_rank(&trial) > out.len() {
            out = trial;
        }
    }
    out
}

pub fn ex1_oracle() -> Ex1Oracle {
    let n = 2;
    let c = linalg::unit(2, 0, 0);
    let all = real_basis(n);
    let fc: Vec<CMat> = all.iter().map(|x| x * &c).collect();
    let cf: Vec<CMat> = all.iter().map(|x| &c * x).collect();
    let d = intersection(&fc, &cf);
    let o = preimage(&all, &d, |x| d.iter().flat_map(|y| [x * y, y * x]).collect());

    // Dirac states on a Bloch-ball grid: ω(C²) = ρ₁₁ = (1 + z) / 2 = 0.
    let steps = 40_i32;
    let mut dirac_states = 0;
    for ix in -steps..=steps {
        for iy in -steps..=steps {
            for iz in -steps..=steps {
                let (x, y, z) = (ix as f64, iy as f64, iz as f64);
                let inside = x * x + y * y + z * z <= (steps * steps) as f64;
                if inside && (steps + iz) == 0 {
                    dirac_states += 1;
                }
            }
        }
    }

    let herm = herm_basis(n);
    let j = vec![c.clone()];
    let jordan = |x: &CMat, y: &CMat| (x * y + y * x) * C64::new(0.5, 0.0);
    let bracket = |x: &CMat, y: &CMat| (x * y - y * x) * C64::new(0.0, 0.5);
    let normalizer = preimage(&herm, &j, |x| vec![bracket(x, &c)]);
    let k: Vec<CMat> = normalizer.iter().flat_map(|x| j.iter().map(|y| jordan(x, y))).collect();
    Ex1Oracle {
        d_dim: d.len() / 2,
        o_dim: o.len() / 2,
        quotient_dim: (o.len() - d.len()) / 2,
        dirac_states,
        reduced_ljb_dim: normalizer.len() - span_rank(&k),
    }
}
