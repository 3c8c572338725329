//! Restarted GMRES with left preconditioning.
//!
//! Inner products run sequentially in index order so that repeated solves are
//! bit-for-bit reproducible.

#[derive(Clone, Debug, PartialEq)]
pub struct KrylovOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `‖M⁻¹(b − Ax)‖ / ‖M⁻¹b‖` at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` from `x = 0` by GMRES(`restart`) on `M⁻¹A x = M⁻¹b`.
pub fn gmres<A, P>(
    apply: A,
    precondition: P,
    rhs: &[f64],
    rtol: f64,
    restart: usize,
    max_iter: usize,
) -> KrylovOutcome
where
    A: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&[f64]) -> Vec<f64>,
{
    let len = rhs.len();
    let mut x = vec![0.0; len];
    let pb = precondition(rhs);
    let b_norm = norm(&pb);
    if b_norm == 0.0 {
        return KrylovOutcome {
            solution: x,
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let target = rtol * b_norm;
    let mut iterations = 0;
    let mut residual = pb.clone();
    let mut r_norm = b_norm;

    while iterations < max_iter {
        let m = restart.min(max_iter - iterations);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(residual.iter().map(|v| v / r_norm).collect());
        // Hessenberg columns, already rotated.
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = r_norm;
        let mut steps = 0;

        for j in 0..m {
            let mut w = precondition(&apply(&basis[j]));
            let mut column = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                column[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let w_norm = norm(&w);
            column[j + 1] = w_norm;
            for i in 0..j {
                let t = cs[i] * column[i] + sn[i] * column[i + 1];
                column[i + 1] = -sn[i] * column[i] + cs[i] * column[i + 1];
                column[i] = t;
            }
            let denom = column[j].hypot(column[j + 1]);
            let (c, s) = if denom == 0.0 {
                (1.0, 0.0)
            } else {
                (column[j] / denom, column[j + 1] / denom)
            };
            column[j] = denom;
            column[j + 1] = 0.0;
            g[j + 1] = -s * g[j];
            g[j] *= c;
            cs.push(c);
            sn.push(s);
            h.push(column);
            steps += 1;
            iterations += 1;
            let estimate = g[j + 1].abs();
            if estimate <= target || w_norm == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }

        // Back substitution on the triangular system.
        let mut y = vec![0.0; steps];
        for i in (0..steps).rev() {
            let mut acc = g[i];
            for k in i + 1..steps {
                acc -= h[k][i] * y[k];
            }
            y[i] = if h[i][i] == 0.0 { 0.0 } else { acc / h[i][i] };
        }
        for (yi, v) in y.iter().zip(&basis) {
            for (xk, vk) in x.iter_mut().zip(v) {
                *xk += yi * vk;
            }
        }

        let ax = apply(&x);
        let raw: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        residual = precondition(&raw);
        r_norm = norm(&residual);
        if r_norm <= target {
            return KrylovOutcome {
                solution: x,
                iterations,
                relative_residual: r_norm / b_norm,
                converged: true,
            };
        }
        if steps == 0 {
            break;
        }
    }
    KrylovOutcome {
        solution: x,
        iterations,
        relative_residual: r_norm / b_norm,
        converged: false,
    }
}
