//! Browser bindings: solve a manufactured problem, sample reference basis
//! functions and show macroelement kernel modes.
//!
//! Every export returns a JSON string. Fields sampled on a `g × g` grid are
//! stored row by row starting at the bottom (`y = 0`), one value per cell centre.

use rectmix::assembly::{Discretization, Material};
use rectmix::mesh::Mesh;
use rectmix::mpoly::PolyField;
use rectmix::refelem::{two_d, ReferenceElement};
use rectmix::stability::macro_kernel;
use rectmix::study::{error_norms, solve_problem, ErrorNorms, Problem};
use rectmix::Family;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest mesh the demo accepts; larger ones take too long in a browser tab.
pub const MAX_MESH: usize = 32;
pub const MAX_GRID: usize = 256;

#[derive(Debug, Serialize)]
pub struct SolveResult {
    pub problem: u8,
    pub n: usize,
    pub k: usize,
    pub family: Family,
    pub stress_dofs: usize,
    pub displacement_dofs: usize,
    pub errors: ErrorNorms,
    pub grid: usize,
    /// `u1`, `u2`, `s11`, `s22`, `s12`.
    pub fields: Vec<NamedField>,
}

#[derive(Debug, Serialize)]
pub struct NamedField {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct BasisResult {
    pub element: String,
    pub k: usize,
    pub family: Family,
    pub dim: usize,
    pub index: usize,
    pub label: String,
    pub grid: usize,
    /// One sampled grid per component of the element.
    pub components: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
pub struct KernelResult {
    pub k: usize,
    pub family: Family,
    pub dimension: usize,
    /// Sine of the angle between the kernel and the projected rigid motions.
    pub rigid_motion_angle: f64,
    /// Relative distance from the checkerboard mode to the kernel.
    pub checkerboard_distance: f64,
    pub grid: usize,
    pub modes: Vec<[Vec<f64>; 2]>,
}

fn check_range(name: &str, value: usize, lo: usize, hi: usize) -> Result<(), String> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(format!("{name} = {value} outside {lo}..={hi}"))
    }
}

fn parse_family(family: &str) -> Result<Family, String> {
    family.parse().map_err(|_| format!("unknown family '{family}'"))
}

/// Element and reference coordinates of the centre of grid cell `(a, b)`.
fn locate(mesh: &Mesh, grid: usize, a: usize, b: usize) -> (usize, [f64; 2]) {
    let n = mesh.n() as f64;
    let coord = |c: usize| {
        let s = (c as f64 + 0.5) / grid as f64 * n;
        let cell = (s.floor() as usize).min(mesh.n() - 1);
        (cell, 2.0 * (s - cell as f64) - 1.0)
    };
    let (i, xi) = coord(a);
    let (j, eta) = coord(b);
    (mesh.element_index(i, j), [xi, eta])
}

fn sample_grid(grid: usize, mut f: impl FnMut(usize, usize) -> Vec<f64>, comps: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(grid * grid); comps];
    for b in 0..grid {
        for a in 0..grid {
            for (c, v) in f(a, b).into_iter().enumerate() {
                out[c].push(v);
            }
        }
    }
    out
}

pub fn solve_json(problem: u8, n: usize, k: usize, family: &str, grid: usize) -> Result<String, String> {
    check_range("n", n, 1, MAX_MESH)?;
    check_range("grid", grid, 1, MAX_GRID)?;
    let family = parse_family(family)?;
    let problem = Problem::from_id(problem).map_err(|e| e.to_string())?;
    let material = Material::default();
    let (disc, sol) = solve_problem(problem, n, k, family, &material).map_err(|e| e.to_string())?;
    let errors = error_norms(&disc, &sol, problem, &material).map_err(|e| e.to_string())?;
    let comps = sample_grid(
        grid,
        |a, b| {
            let (e, xi) = locate(disc.mesh(), grid, a, b);
            let u = disc.displacement_at(&sol.displacement, e, &xi);
            let s = disc.stress_at(&sol.stress, e, &xi);
            vec![u[0], u[1], s[0], s[1], s[2]]
        },
        5,
    );
    let fields = ["u1", "u2", "s11", "s22", "s12"]
        .iter()
        .zip(comps)
        .map(|(name, values)| NamedField {
            name: name.to_string(),
            values,
        })
        .collect();
    let result = SolveResult {
        problem: problem.id(),
        n,
        k,
        family,
        stress_dofs: disc.dofs().n_stress(),
        displacement_dofs: disc.dofs().n_disp(),
        errors,
        grid,
        fields,
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

fn reference_element(element: &str, k: usize, family: Family) -> Result<ReferenceElement<2>, String> {
    match element {
        "stress" => two_d::stress_element(k, family),
        "normal" => two_d::normal_stress_element(k, family),
        "shear" => two_d::shear_element(k),
        "displacement" => two_d::displacement_element(k, family),
        other => return Err(format!("unknown element '{other}'")),
    }
    .map_err(|e| e.to_string())
}

pub fn basis_json(element: &str, k: usize, family: &str, index: usize, grid: usize) -> Result<String, String> {
    check_range("grid", grid, 1, MAX_GRID)?;
    let family = parse_family(family)?;
    let elem = reference_element(element, k, family)?;
    if index >= elem.dim() {
        return Err(format!("index {index} outside 0..{}", elem.dim()));
    }
    let phi: &PolyField<2> = &elem.basis()[index];
    let h = 2.0 / grid as f64;
    let components = sample_grid(
        grid,
        |a, b| phi.eval(&[-1.0 + (a as f64 + 0.5) * h, -1.0 + (b as f64 + 0.5) * h]),
        elem.n_comps(),
    );
    let result = BasisResult {
        element: elem.name().to_string(),
        k,
        family,
        dim: elem.dim(),
        index,
        label: elem.dofs()[index].label.clone(),
        grid,
        components,
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

pub fn kernel_json(k: usize, family: &str, grid: usize) -> Result<String, String> {
    check_range("grid", grid, 1, MAX_GRID)?;
    let family = parse_family(family)?;
    let mk = macro_kernel(k, family).map_err(|e| e.to_string())?;
    let disc: &Discretization = mk.discretization();
    let rigid_motion_angle = mk.angle_to(&mk.rigid_motions()).map_err(|e| e.to_string())?;
    let checkerboard_distance = mk.distance(&mk.checkerboard());
    let modes = (0..mk.dimension())
        .map(|j| {
            let v = mk.mode(j);
            let [u1, u2]: [Vec<f64>; 2] = sample_grid(
                grid,
                |a, b| {
                    let (e, xi) = locate(disc.mesh(), grid, a, b);
                    disc.displacement_at(&v, e, &xi).to_vec()
                },
                2,
            )
            .try_into()
            .unwrap_or_default();
            [u1, u2]
        })
        .collect();
    let result = KernelResult {
        k,
        family,
        dimension: mk.dimension(),
        rigid_motion_angle,
        checkerboard_distance,
        grid,
        modes,
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

/// Solve manufactured problem 1 (clamped) or 2 (traction) on the `n × n` mesh.
#[wasm_bindgen]
pub fn solve(problem: u8, n: usize, k: usize, family: &str, grid: usize) -> Result<String, JsError> {
    solve_json(problem, n, k, family, grid).map_err(|e| JsError::new(&e))
}

/// Basis function `index` of a reference element on `[-1, 1]²`.
#[wasm_bindgen]
pub fn basis(element: &str, k: usize, family: &str, index: usize, grid: usize) -> Result<String, JsError> {
    basis_json(element, k, family, index, grid).map_err(|e| JsError::new(&e))
}

/// Kernel modes of the macroelement coupling on the 2×2 mesh.
#[wasm_bindgen]
pub fn kernel(k: usize, family: &str, grid: usize) -> Result<String, JsError> {
    kernel_json(k, family, grid).map_err(|e| JsError::new(&e))
}
