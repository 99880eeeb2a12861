//! Golden-section refinement of extrema located on a coarse grid.

const INV_PHI: f64 = 0.618_033_988_749_894_9;
/// Bracket width at which refinement stops.
pub(crate) const ARG_TOL: f64 = 1e-8;

/// Maximizes a unimodal `f` on `[a, b]`; returns `(x, f(x))`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > ARG_TOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Index of the largest sample; ties go to the lowest index.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    values
        .into_iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        })
}

/// Refined maximum of `f` on a periodic 1-D grid with uniform `spacing`,
/// given the samples already taken at `grid`.
pub(crate) fn refine_max_1d(
    f: impl Fn(f64) -> f64,
    grid: &[f64],
    samples: &[f64],
    spacing: f64,
) -> f64 {
    let (k, coarse) = argmax(samples.iter().copied());
    let x = grid[k];
    let (_, refined) = golden_max(&f, x - spacing, x + spacing);
    refined.max(coarse)
}

/// Refined maximum of `f(x, y)` over a periodic product grid.
///
/// For every `y` the inner maximum over `x` is refined from the best grid
/// `x`; the outer maximum over `y` is then refined the same way. `samples`
/// is row-major with `x` as the slow index.
pub(crate) fn refine_max_2d(
    f: impl Fn(f64, f64) -> f64 + Sync,
    xs: &[f64],
    ys: &[f64],
    samples: &[f64],
    dx: f64,
    dy: f64,
) -> f64 {
    let ny = ys.len();
    let inner_from_samples = |col: usize| {
        let column: Vec<f64> = (0..xs.len()).map(|i| samples[i * ny + col]).collect();
        refine_max_1d(|x| f(x, ys[col]), xs, &column, dx)
    };
    let inner_fresh = |y: f64| {
        let column: Vec<f64> = xs.iter().map(|&x| f(x, y)).collect();
        refine_max_1d(|x| f(x, y), xs, &column, dx)
    };
    let profile: Vec<f64> = (0..ny).map(inner_from_samples).collect();
    let (k, coarse) = argmax(profile.iter().copied());
    let y = ys[k];
    let (_, refined) = golden_max(inner_fresh, y - dy, y + dy);
    refined.max(coarse)
}
