//! Benchmark test functions on the unit cube and their registry.

use std::collections::BTreeMap;
use std::sync::Arc;

/// A named target function of fixed dimension.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    dim: usize,
    eval: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    /// Borrowable closure for the fit drivers.
    pub fn as_fn(&self) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
        move |x: &[f64]| (self.eval)(x)
    }
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .finish()
    }
}

/// Two-dimensional Franke-type benchmark. The first exponential carries no
/// divisor on its exponents (see [`franke2d_classic`] for the variant that
/// divides them by 4).
pub fn franke2d(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    0.75 * (-(9.0 * x1 - 2.0).powi(2) - (9.0 * x2 - 2.0).powi(2)).exp()
        + 0.75 * (-(9.0 * x1 + 1.0).powi(2) / 49.0 - (9.0 * x2 + 1.0).powi(2) / 10.0).exp()
        + 0.5 * (-(9.0 * x1 - 7.0).powi(2) / 4.0 - (9.0 * x2 - 3.0).powi(2)).exp()
        - 0.2 * (-(9.0 * x1 - 4.0).powi(2) / 4.0 - (9.0 * x2 - 7.0).powi(2)).exp()
}

/// Classical Franke function: identical to [`franke2d`] except the first
/// term's exponents are divided by 4.
pub fn franke2d_classic(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    0.75 * ((-(9.0 * x1 - 2.0).powi(2) - (9.0 * x2 - 2.0).powi(2)) / 4.0).exp()
        + 0.75 * (-(9.0 * x1 + 1.0).powi(2) / 49.0 - (9.0 * x2 + 1.0).powi(2) / 10.0).exp()
        + 0.5 * (-(9.0 * x1 - 7.0).powi(2) / 4.0 - (9.0 * x2 - 3.0).powi(2)).exp()
        - 0.2 * (-(9.0 * x1 - 4.0).powi(2) / 4.0 - (9.0 * x2 - 7.0).powi(2)).exp()
}

/// Three-dimensional Franke-type benchmark.
pub fn franke3d(x: &[f64]) -> f64 {
    let (x1, x2, x3) = (x[0], x[1], x[2]);
    0.75 * ((-(9.0 * x1 - 2.0).powi(2) - (9.0 * x2 - 2.0).powi(2) - (9.0 * x3 - 2.0).powi(2))
        / 4.0)
        .exp()
        + 0.75
            * (-(9.0 * x1 + 1.0).powi(2) / 49.0
                - (9.0 * x2 + 1.0).powi(2) / 10.0
                - (9.0 * x3 + 1.0).powi(2) / 29.0)
                .exp()
        + 0.5
            * (-(9.0 * x1 - 7.0).powi(2) / 4.0
                - (9.0 * x2 - 3.0).powi(2)
                - (9.0 * x3 - 5.0).powi(2) / 2.0)
                .exp()
        - 0.2
            * (-(9.0 * x1 - 4.0).powi(2) / 4.0
                - (9.0 * x2 - 7.0).powi(2)
                - (9.0 * x3 - 5.0).powi(2))
            .exp()
}

/// Four-dimensional Franke-type benchmark, with its asymmetric divisor
/// pattern (/4 grouping the first three exponents, /8 on the fourth, and so
/// on).
pub fn franke4d(x: &[f64]) -> f64 {
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    0.75 * ((-(9.0 * x1 - 2.0).powi(2) - (9.0 * x2 - 2.0).powi(2) - (9.0 * x3 - 2.0).powi(2))
        / 4.0
        - (9.0 * x4 - 2.0).powi(2) / 8.0)
        .exp()
        + 0.75
            * (-(9.0 * x1 + 1.0).powi(2) / 49.0
                - (9.0 * x2 + 1.0).powi(2) / 10.0
                - (9.0 * x3 + 1.0).powi(2) / 29.0
                - (9.0 * x4 + 1.0).powi(2) / 39.0)
                .exp()
        + 0.5
            * (-(9.0 * x1 - 7.0).powi(2) / 4.0
                - (9.0 * x2 - 3.0).powi(2)
                - (9.0 * x3 - 5.0).powi(2) / 2.0
                - (9.0 * x4 - 5.0).powi(2) / 4.0)
                .exp()
        - 0.2
            * (-(9.0 * x1 - 4.0).powi(2) / 4.0
                - (9.0 * x2 - 7.0).powi(2)
                - (9.0 * x3 - 5.0).powi(2)
                - (9.0 * x4 - 5.0).powi(2))
            .exp()
}

/// `4^4 * prod_i x_i (1 - x_i)`; equals 1 at the cube center and 0 on the
/// boundary.
pub fn quad4d(x: &[f64]) -> f64 {
    256.0 * x.iter().map(|&xi| xi * (1.0 - xi)).product::<f64>()
}

fn radial_log(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|&xi| xi * xi).sum();
    if r2 == 0.0 {
        // removable limit: r^2 log r -> 0
        return 0.0;
    }
    let r = r2.sqrt();
    (r2 + r2 * r2) * r.ln()
}

/// `(r^2 + r^4) log r` with `r = ||x||_2` over three coordinates; 0 at the
/// origin. Not smooth in its mixed derivatives.
pub fn r3d(x: &[f64]) -> f64 {
    radial_log(x)
}

/// Four-variate version of [`r3d`].
pub fn r4d(x: &[f64]) -> f64 {
    radial_log(x)
}

/// Registry of target functions, keyed by name. Starts with the six
/// built-ins; more can be registered.
#[derive(Debug, Clone)]
pub struct FunctionRegistry {
    map: BTreeMap<String, TestFunction>,
}

impl FunctionRegistry {
    pub fn with_builtins() -> Self {
        let mut reg = Self {
            map: BTreeMap::new(),
        };
        reg.register(TestFunction::new("franke2d", 2, franke2d));
        reg.register(TestFunction::new("franke3d", 3, franke3d));
        reg.register(TestFunction::new("franke4d", 4, franke4d));
        reg.register(TestFunction::new("quad4d", 4, quad4d));
        reg.register(TestFunction::new("r3d", 3, r3d));
        reg.register(TestFunction::new("r4d", 4, r4d));
        reg
    }

    /// Inserts or replaces a function under its own name.
    pub fn register(&mut self, f: TestFunction) {
        self.map.insert(f.name().to_string(), f);
    }

    pub fn get(&self, name: &str) -> Option<&TestFunction> {
        self.map.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(|s| s.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // golden values frozen from an independent arbitrary-precision
    // evaluation before the implementation was written
    const TOL: f64 = 1e-15;

    #[test]
    fn franke2d_goldens() {
        assert!((franke2d(&[0.5, 0.5]) - 0.030329637730145864).abs() < TOL);
        assert!((franke2d(&[0.3, 0.7]) - (-0.077553505664542550)).abs() < TOL);
    }

    #[test]
    fn franke2d_classic_goldens() {
        assert!((franke2d_classic(&[0.5, 0.5]) - 0.063279542957822368).abs() < TOL);
        assert!((franke2d_classic(&[0.3, 0.7]) - (-0.071032213447181282)).abs() < TOL);
    }

    #[test]
    fn franke3d_goldens() {
        assert!((franke3d(&[0.5, 0.5, 0.5]) - 0.023294672107166406).abs() < TOL);
        assert!((franke3d(&[0.1, 0.2, 0.3]) - 0.68385831004780894).abs() < TOL);
    }

    #[test]
    fn franke4d_goldens() {
        assert!((franke4d(&[0.5, 0.5, 0.5, 0.5]) - 0.015286893058818234).abs() < TOL);
        assert!((franke4d(&[0.1, 0.2, 0.3, 0.4]) - 0.46783486560210499).abs() < TOL);
    }

    #[test]
    fn quad4d_examples() {
        assert_eq!(quad4d(&[0.5, 0.5, 0.5, 0.5]), 1.0);
        assert_eq!(quad4d(&[0.0, 0.2, 0.9, 0.4]), 0.0);
        assert!((quad4d(&[0.1, 0.2, 0.3, 0.4]) - 0.18579456).abs() < TOL);
    }

    #[test]
    fn radial_log_examples() {
        assert_eq!(r3d(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(r4d(&[0.0, 0.0, 0.0, 0.0]), 0.0);
        assert!((r3d(&[0.5, 0.5, 0.5]) - (-0.18879136004648123)).abs() < TOL);
        assert!((r3d(&[1.0, 1.0, 1.0]) - 6.5916737320086581).abs() < 1e-14);
        assert_eq!(r4d(&[0.5, 0.5, 0.5, 0.5]), 0.0); // r = 1, log r = 0
    }

    #[test]
    fn registry_has_exactly_the_builtins() {
        let reg = FunctionRegistry::with_builtins();
        let names: Vec<&str> = reg.names().collect();
        assert_eq!(
            names,
            vec!["franke2d", "franke3d", "franke4d", "quad4d", "r3d", "r4d"]
        );
        assert_eq!(reg.get("franke2d").unwrap().dim(), 2);
        assert_eq!(reg.get("quad4d").unwrap().dim(), 4);
        assert!(reg.get("nope").is_none());
    }

    #[test]
    fn registry_accepts_user_functions() {
        let mut reg = FunctionRegistry::with_builtins();
        reg.register(TestFunction::new("plane", 2, |x: &[f64]| x[0] + x[1]));
        assert_eq!(reg.get("plane").unwrap().eval(&[0.25, 0.5]), 0.75);
    }

    #[test]
    fn functions_are_finite_on_the_cube() {
        let reg = FunctionRegistry::with_builtins();
        for name in ["franke2d", "franke3d", "franke4d", "quad4d", "r3d", "r4d"] {
            let f = reg.get(name).unwrap();
            let steps = 5usize;
            let d = f.dim();
            let mut idx = vec![0usize; d];
            loop {
                let x: Vec<f64> = idx.iter().map(|&i| i as f64 / (steps - 1) as f64).collect();
                assert!(f.eval(&x).is_finite(), "{name} not finite at {x:?}");
                let mut k = 0;
                while k < d {
                    idx[k] += 1;
                    if idx[k] < steps {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
        }
    }
}
