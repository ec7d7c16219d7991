//! Geometric state in one affine chart: strict transforms of the hypersurface
//! factors, boundary/exceptional divisor components with birth years, and the
//! transformed year-zero ideal bookkeeping. Blowing up produces one child
//! scene per centre coordinate; scenes are immutable once built.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{parse_poly, poly_to_string, Poly, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisorOrigin {
    InputBoundary,
    Exceptional,
}

/// One component of the boundary divisor in this chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorComponent {
    pub id: String,
    pub poly: Poly,
    pub birth_year: u32,
    pub origin: DivisorOrigin,
}

impl DivisorComponent {
    pub fn passes_through(&self, point: &[Rat]) -> Result<bool> {
        Ok(self.poly.eval(point)?.is_zero())
    }
}

/// A hypersurface factor together with the input factor it descends from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XFactor {
    pub input_id: usize,
    pub poly: Poly,
}

/// Record of the blowup that produced a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupRecord {
    pub parent_chart: String,
    pub centre: CentreDescription,
    pub pivot: usize,
    pub year: u32,
}

/// A centre: a coordinate subspace of the chart, possibly translated to a
/// rational base point and preceded by shear coordinate changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentreDescription {
    /// Shears x_i -> x_i + q applied before the subspace becomes coordinate.
    pub shears: Vec<(usize, Poly)>,
    /// Indices of the defining coordinates, ascending.
    pub coords: Vec<usize>,
    /// Base point; the all-zero vector for centres through the origin.
    pub offset: Vec<Rat>,
}

impl CentreDescription {
    pub fn at_origin(coords: Vec<usize>, nvars: usize) -> Self {
        CentreDescription {
            shears: Vec::new(),
            coords,
            offset: vec![Rat::zero(); nvars],
        }
    }

    pub fn codim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_origin_based(&self) -> bool {
        self.offset.iter().all(Rat::is_zero)
    }

    /// Defining polynomials in the chart frame (inverting shears, then the
    /// translation to the base point).
    pub fn defining_polys(&self, nvars: usize) -> Result<Vec<Poly>> {
        let mut polys: Vec<Poly> = self.coords.iter().map(|&i| Poly::var(nvars, i)).collect();
        // Undo shears, most recent first: a sheared coordinate x_i' = x_i + q
        // reads x_i + q in the frame below it.
        for (i, q) in self.shears.iter().rev() {
            for p in &mut polys {
                let image = Poly::var(nvars, *i).add(q);
                *p = p.substitute_var(*i, &image)?;
            }
        }
        let neg: Vec<Rat> = self.offset.iter().map(|o| -o.clone()).collect();
        for p in &mut polys {
            *p = p.translate(&neg)?;
        }
        Ok(polys)
    }

    /// A rational point on the centre with the free coordinates set to the
    /// given value. Used for snc witnesses on positive-dimensional centres.
    pub fn sample_point(&self, nvars: usize, free_value: i64) -> Result<Vec<Rat>> {
        let mut pt: Vec<Rat> = (0..nvars)
            .map(|i| {
                if self.coords.contains(&i) {
                    Rat::zero()
                } else {
                    Rat::from_integer(free_value.into())
                }
            })
            .collect();
        // Map back through the shears to chart coordinates: under
        // x_i' = x_i + q the chart value is x_i = x_i' - q(rest).
        for (i, q) in self.shears.iter().rev() {
            let qv = q.eval(&pt)?;
            pt[*i] -= qv;
        }
        for (i, o) in self.offset.iter().enumerate() {
            pt[i] += o;
        }
        Ok(pt)
    }

    /// Does `f` vanish identically on the centre? Substitutes the centre's
    /// parametrization and tests for the zero polynomial.
    pub fn contains_hypersurface(&self, f: &Poly) -> Result<bool> {
        let nvars = f.nvars();
        let mut g = f.clone();
        // Shift to the base point, then push through the shears so the centre
        // becomes a plain coordinate subspace.
        g = g.translate(&self.offset)?;
        for (i, q) in &self.shears {
            // x_i = x_i' - q in the sheared frame.
            let image = Poly::var(nvars, *i).sub(q);
            g = g.substitute_var(*i, &image)?;
        }
        for &i in &self.coords {
            g = g.set_var_zero(i);
        }
        Ok(g.is_zero())
    }
}

/// One affine chart of the resolution in progress.
#[derive(Debug, Clone)]
pub struct Scene {
    pub chart_id: String,
    /// Creation order across the whole tree; ties in probe selection break
    /// towards older charts.
    pub chart_seq: u64,
    pub year: u32,
    pub variables: Vec<String>,
    pub x_factors: Vec<XFactor>,
    pub divisors: Vec<DivisorComponent>,
    pub exc_multiplicities: BTreeMap<String, u32>,
    pub parent: Option<Box<BlowupRecord>>,
    /// Shears permanently applied to this chart's frame.
    pub coordinate_changes: Vec<(usize, Poly)>,
}

impl Scene {
    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn origin(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.nvars()]
    }

    pub fn divisor(&self, id: &str) -> Option<&DivisorComponent> {
        self.divisors.iter().find(|d| d.id == id)
    }

    /// The transformed year-zero ideal of this chart: the product of the
    /// factor strict transforms and the recorded exceptional multiplicities.
    pub fn controlled_ideal(&self) -> Result<Poly> {
        let mut p = Poly::one(self.nvars());
        for f in &self.x_factors {
            p = p.mul(&f.poly)?;
        }
        for (id, &m) in &self.exc_multiplicities {
            if m == 0 {
                continue;
            }
            let d = self
                .divisor(id)
                .ok_or_else(|| Error::Internal(format!("unknown divisor {id} in multiplicities")))?;
            p = p.mul(&d.poly.pow(m)?)?;
        }
        Ok(p)
    }

    pub fn fmt_poly(&self, p: &Poly) -> String {
        poly_to_string(p, &self.variables)
    }

    /// Divisors whose defining polynomial vanishes at the point.
    pub fn divisors_through(&self, point: &[Rat]) -> Result<Vec<&DivisorComponent>> {
        let mut out = Vec::new();
        for d in &self.divisors {
            if d.passes_through(point)? {
                out.push(d);
            }
        }
        Ok(out)
    }

    /// Factors vanishing at the point.
    pub fn factors_through(&self, point: &[Rat]) -> Result<Vec<&XFactor>> {
        let mut out = Vec::new();
        for f in &self.x_factors {
            if f.poly.eval(point)?.is_zero() {
                out.push(f);
            }
        }
        Ok(out)
    }
}

fn associates(a: &Poly, b: &Poly) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    match (a.leading(), b.leading()) {
        (Some((ma, ca)), Some((mb, cb))) => {
            if ma != mb {
                return false;
            }
            let ratio = ca / cb;
            a == &b.scale(&ratio)
        }
        _ => false,
    }
}

/// Exact rank of a matrix of rationals, by fraction-free elimination.
pub fn rational_rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let pivot_row = m[rank].clone();
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot_row[col];
            for c in col..ncols {
                let delta = &pivot_row[c] * &factor;
                m[r][c] = &m[r][c] - &delta;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Build the year-zero scene. The boundary must be an snc divisor at every
/// probe point and no boundary component may coincide with a hypersurface
/// factor.
pub fn make_root_scene(
    variables: Vec<String>,
    x_factor_polys: Vec<Poly>,
    boundary: Vec<(String, Poly)>,
    probe_points: &[Vec<Rat>],
) -> Result<Scene> {
    let nvars = variables.len();
    if x_factor_polys.is_empty() {
        return Err(Error::input("at least one hypersurface factor is required"));
    }
    for f in &x_factor_polys {
        if f.is_zero() {
            return Err(Error::input("hypersurface factors must be nonzero"));
        }
        if f.is_constant() {
            return Err(Error::input("hypersurface factors must be nonconstant"));
        }
    }
    for i in 0..x_factor_polys.len() {
        for j in i + 1..x_factor_polys.len() {
            if associates(&x_factor_polys[i], &x_factor_polys[j]) {
                return Err(Error::input(format!(
                    "hypersurface factors {i} and {j} are associate; list each component once"
                )));
            }
        }
    }
    for (id, h) in &boundary {
        if h.is_zero() || h.is_constant() {
            return Err(Error::input(format!(
                "boundary component {id} must be a nonconstant polynomial"
            )));
        }
        for f in &x_factor_polys {
            if associates(h, f) {
                return Err(Error::input(format!(
                    "boundary component {id} coincides with a hypersurface factor; \
                     a divisor component cannot serve as both"
                )));
            }
        }
    }
    // The boundary alone must be snc at every probe point: each component
    // through the point smooth there, with independent linear parts.
    for pt in probe_points {
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for (id, h) in &boundary {
            if !h.eval(pt)?.is_zero() {
                continue;
            }
            let lin = h.linear_part_at(pt)?;
            if lin.iter().all(Rat::is_zero) {
                return Err(Error::input(format!(
                    "boundary component {id} is singular at a probe point; the boundary must be snc"
                )));
            }
            rows.push(lin);
        }
        let n = rows.len();
        if rational_rank(&rows) != n {
            return Err(Error::input(
                "boundary components fail to cross normally at a probe point",
            ));
        }
    }

    let divisors = boundary
        .into_iter()
        .map(|(id, poly)| DivisorComponent {
            id,
            poly,
            birth_year: 0,
            origin: DivisorOrigin::InputBoundary,
        })
        .collect();

    Ok(Scene {
        chart_id: "r".to_string(),
        chart_seq: 0,
        year: 0,
        variables,
        x_factors: x_factor_polys
            .into_iter()
            .enumerate()
            .map(|(input_id, poly)| XFactor { input_id, poly })
            .collect(),
        divisors,
        exc_multiplicities: BTreeMap::new(),
        parent: None,
        coordinate_changes: Vec::new(),
    })
}

/// Outcome of an admissibility test, with the reason when it fails.
#[derive(Debug, Clone)]
pub struct Admissibility {
    pub ok: bool,
    pub reason: String,
}

/// A blowup centre is admissible when it lies inside the hypersurface and
/// every divisor component is, near the centre, a coordinate (up to constant
/// factor) or misses the centre entirely.
pub fn admissibility_check(scene: &Scene, centre: &CentreDescription) -> Result<Admissibility> {
    let nvars = scene.nvars();
    if centre.coords.is_empty() || centre.coords.iter().any(|&i| i >= nvars) {
        return Ok(Admissibility {
            ok: false,
            reason: "centre coordinates out of range".into(),
        });
    }
    let mut product = Poly::one(nvars);
    for f in &scene.x_factors {
        product = product.mul(&f.poly)?;
    }
    if !centre.contains_hypersurface(&product)? {
        return Ok(Admissibility {
            ok: false,
            reason: "centre not inside X".into(),
        });
    }
    for d in &scene.divisors {
        // A coordinate (up to scalar) always crosses a coordinate subspace
        // normally or contains it.
        let is_coordinate = d
            .poly
            .leading()
            .map(|(m, _)| m.total_degree() == 1 && d.poly.num_terms() == 1)
            .unwrap_or(false);
        if is_coordinate {
            continue;
        }
        if centre.contains_hypersurface(&d.poly)? {
            return Ok(Admissibility {
                ok: false,
                reason: format!(
                    "divisor {} contains the centre but is not a coordinate in this frame",
                    d.id
                ),
            });
        }
        // Restriction of the divisor to the centre: a nonzero constant means
        // the divisor stays away from the centre; a nonconstant restriction
        // means it meets the centre somewhere without being a coordinate.
        let mut g = d.poly.translate(&centre.offset)?;
        for (i, q) in &centre.shears {
            let image = Poly::var(nvars, *i).sub(q);
            g = g.substitute_var(*i, &image)?;
        }
        for &i in &centre.coords {
            g = g.set_var_zero(i);
        }
        if g.constant_value().is_none() {
            return Ok(Admissibility {
                ok: false,
                reason: format!(
                    "divisor {} meets the centre without crossing it normally",
                    d.id
                ),
            });
        }
    }
    Ok(Admissibility {
        ok: true,
        reason: String::new(),
    })
}

/// Replace coordinate x_i by x_i + q. The inverse substitution x_i -> x_i - q
/// is applied to every polynomial of the scene, so the scene's polynomials
/// stay expressed in the current frame.
pub fn apply_shear(scene: &Scene, i: usize, q: &Poly) -> Result<Scene> {
    if q.involves(i) {
        return Err(Error::input(
            "shear polynomial must not involve the sheared coordinate",
        ));
    }
    if !q.eval(&scene.origin())?.is_zero() {
        return Err(Error::input("shear polynomial must have zero constant term"));
    }
    let nvars = scene.nvars();
    let image = Poly::var(nvars, i).sub(q);
    let mut out = scene.clone();
    for f in &mut out.x_factors {
        f.poly = f.poly.substitute_var(i, &image)?;
    }
    for d in &mut out.divisors {
        d.poly = d.poly.substitute_var(i, &image)?;
    }
    out.coordinate_changes.push((i, q.clone()));
    Ok(out)
}

/// Compute all charts of the blowup along an admissible centre. One child per
/// centre coordinate (its pivot); each child's new exceptional divisor is the
/// pivot coordinate.
pub fn blowup_charts(
    scene: &Scene,
    centre: &CentreDescription,
    next_seq: &mut u64,
    exceptional_birth: Option<u32>,
) -> Result<Vec<Scene>> {
    let adm = admissibility_check(scene, centre)?;
    if !adm.ok {
        return Err(Error::domain(format!("inadmissible centre: {}", adm.reason)));
    }
    if !centre.shears.is_empty() && !centre.is_origin_based() {
        return Err(Error::domain(
            "unsupported: sheared centre at a non-origin base point",
        ));
    }
    // Shears become part of the chart frame before a non-coordinate centre is
    // blown up.
    let mut base = scene.clone();
    for (i, q) in &centre.shears {
        base = apply_shear(&base, *i, q)?;
    }
    let nvars = base.nvars();
    let year = base.year + 1;
    let birth = exceptional_birth.unwrap_or(year);
    let mut children = Vec::new();
    for &pivot in &centre.coords {
        // Chart substitution: the pivot sweeps out the exceptional direction.
        let mut images: Vec<Poly> = Vec::with_capacity(nvars);
        for j in 0..nvars {
            let v = Poly::var(nvars, j);
            let img = if j == pivot {
                v.add(&Poly::constant(nvars, centre.offset[j].clone()))
            } else if centre.coords.contains(&j) {
                Poly::var(nvars, pivot)
                    .mul(&v)?
                    .add(&Poly::constant(nvars, centre.offset[j].clone()))
            } else {
                v
            };
            images.push(img);
        }

        let exc_id = format!("E{}@{}", year, base.variables[pivot]);
        let mut divisors: Vec<DivisorComponent> = Vec::new();
        for d in &base.divisors {
            let pulled = d.poly.substitute(&images)?;
            if pulled.is_zero() {
                return Err(Error::Internal(format!("divisor {} pulled back to zero", d.id)));
            }
            let k = pulled.ord_along_coordinate(pivot)?;
            let strict = pulled.divexact_coordinate(pivot, k)?;
            if strict.is_constant() {
                // The strict transform misses this chart entirely.
                continue;
            }
            divisors.push(DivisorComponent {
                id: d.id.clone(),
                poly: strict,
                birth_year: d.birth_year,
                origin: d.origin,
            });
        }
        divisors.push(DivisorComponent {
            id: exc_id.clone(),
            poly: Poly::var(nvars, pivot),
            birth_year: birth,
            origin: DivisorOrigin::Exceptional,
        });

        let mut x_factors: Vec<XFactor> = Vec::new();
        for f in &base.x_factors {
            let pulled = f.poly.substitute(&images)?;
            if pulled.is_zero() {
                return Err(Error::Internal("factor pulled back to zero".into()));
            }
            let k = pulled.ord_along_coordinate(pivot)?;
            let strict = pulled.divexact_coordinate(pivot, k)?;
            if strict.is_constant() {
                continue;
            }
            x_factors.push(XFactor {
                input_id: f.input_id,
                poly: strict,
            });
        }

        // Controlled transform of the chart ideal: pull back and divide by
        // exactly one power of the exceptional coordinate (year-zero mark 1).
        let parent_ideal = base.controlled_ideal()?;
        let pulled = parent_ideal.substitute(&images)?;
        let controlled = pulled.divexact_coordinate(pivot, 1).map_err(|_| {
            Error::domain("controlled transform failed: centre not inside the cosupport")
        })?;

        // Recover the exceptional multiplicities from the factorization of
        // the controlled ideal by the strict transforms.
        let mut rest = controlled.clone();
        for f in &x_factors {
            rest = rest.div_exact(&f.poly).ok_or_else(|| {
                Error::Internal("controlled ideal is not divisible by a factor strict transform".into())
            })?;
        }
        let mut exc_multiplicities = BTreeMap::new();
        for d in &divisors {
            let m = rest.multiplicity_of(&d.poly).unwrap_or(0);
            if m > 0 {
                rest = (0..m).fold(rest.clone(), |acc, _| acc.div_exact(&d.poly).unwrap());
                exc_multiplicities.insert(d.id.clone(), m);
            }
        }
        if rest.constant_value().is_none() {
            return Err(Error::Internal(
                "controlled-transform bookkeeping failed: residue is not a unit".into(),
            ));
        }

        *next_seq += 1;
        let child = Scene {
            chart_id: format!("{}.{}", base.chart_id, base.variables[pivot]),
            chart_seq: *next_seq,
            year,
            variables: base.variables.clone(),
            x_factors,
            divisors,
            exc_multiplicities,
            parent: Some(Box::new(BlowupRecord {
                parent_chart: base.chart_id.clone(),
                centre: centre.clone(),
                pivot,
                year,
            })),
            coordinate_changes: base.coordinate_changes.clone(),
        };
        // The scene invariant: factors times exceptional monomial generate
        // the controlled transform, up to the unit absorbed above.
        debug_assert!({
            let prod = child.controlled_ideal()?;
            let unit = rest.constant_value().unwrap();
            prod.scale(&unit) == controlled
        });
        children.push(child);
    }
    Ok(children)
}

/// Map a point of a child chart to its image in the parent chart.
pub fn map_point_to_parent(child: &Scene, point: &[Rat]) -> Result<Vec<Rat>> {
    let record = child
        .parent
        .as_ref()
        .ok_or_else(|| Error::domain("root scene has no parent"))?;
    let centre = &record.centre;
    let pivot = record.pivot;
    let nvars = child.nvars();
    let mut parent_pt: Vec<Rat> = (0..nvars)
        .map(|j| {
            if j == pivot {
                &point[j] + &centre.offset[j]
            } else if centre.coords.contains(&j) {
                &(&point[pivot] * &point[j]) + &centre.offset[j]
            } else {
                point[j].clone()
            }
        })
        .collect();
    // The child frame includes the shears applied before the blowup: undo
    // them to land in the parent's frame.
    for (i, q) in centre.shears.iter().rev() {
        let qv = q.eval(&parent_pt)?;
        parent_pt[*i] -= qv;
    }
    Ok(parent_pt)
}

/// Serialized form of a scene (structured text with polynomial strings).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneDoc {
    pub chart_id: String,
    pub year: u32,
    pub variables: Vec<String>,
    pub x_factors: Vec<String>,
    pub divisors: Vec<DivisorDoc>,
    pub exc_multiplicities: BTreeMap<String, u32>,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorDoc {
    pub id: String,
    pub poly: String,
    pub birth_year: u32,
    pub origin: DivisorOrigin,
}

impl Scene {
    pub fn to_doc(&self) -> SceneDoc {
        SceneDoc {
            chart_id: self.chart_id.clone(),
            year: self.year,
            variables: self.variables.clone(),
            x_factors: self
                .x_factors
                .iter()
                .map(|f| poly_to_string(&f.poly, &self.variables))
                .collect(),
            divisors: self
                .divisors
                .iter()
                .map(|d| DivisorDoc {
                    id: d.id.clone(),
                    poly: poly_to_string(&d.poly, &self.variables),
                    birth_year: d.birth_year,
                    origin: d.origin,
                })
                .collect(),
            exc_multiplicities: self.exc_multiplicities.clone(),
            parent: self.parent.as_ref().map(|p| p.parent_chart.clone()),
        }
    }

    pub fn from_doc(doc: &SceneDoc) -> Result<Scene> {
        let vars = doc.variables.clone();
        let x_factors = doc
            .x_factors
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Ok(XFactor {
                    input_id: i,
                    poly: parse_poly(s, &vars)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let divisors = doc
            .divisors
            .iter()
            .map(|d| {
                Ok(DivisorComponent {
                    id: d.id.clone(),
                    poly: parse_poly(&d.poly, &vars)?,
                    birth_year: d.birth_year,
                    origin: d.origin,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Scene {
            chart_id: doc.chart_id.clone(),
            chart_seq: 0,
            year: doc.year,
            variables: vars,
            x_factors,
            divisors,
            exc_multiplicities: doc.exc_multiplicities.clone(),
            parent: None,
            coordinate_changes: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    fn vars() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    fn p(s: &str) -> Poly {
        parse_poly(s, &vars()).unwrap()
    }

    fn cusp_root() -> Scene {
        make_root_scene(vars(), vec![p("z^3 + x*y")], vec![], &[vec![
            rat_int(0),
            rat_int(0),
            rat_int(0),
        ]])
        .unwrap()
    }

    #[test]
    fn root_scene_examples() {
        let s = cusp_root();
        assert_eq!(s.year, 0);
        assert!(s.divisors.is_empty());

        let pair = make_root_scene(vars(), vec![p("x"), p("x + y*z")], vec![], &[]).unwrap();
        assert_eq!(pair.x_factors.len(), 2);

        // A boundary component equal to a hypersurface factor is rejected.
        let names: Vec<String> = vec!["x".into()];
        let f = parse_poly("x", &names).unwrap();
        let r = make_root_scene(names, vec![f.clone()], vec![("H0".into(), f)], &[]);
        assert!(r.is_err());
    }

    #[test]
    fn admissibility_examples() {
        let s = cusp_root();
        let origin = CentreDescription::at_origin(vec![0, 1, 2], 3);
        assert!(admissibility_check(&s, &origin).unwrap().ok);

        let off_x = make_root_scene(vars(), vec![p("x")], vec![], &[]).unwrap();
        let c = CentreDescription::at_origin(vec![1], 3);
        let adm = admissibility_check(&off_x, &c).unwrap();
        assert!(!adm.ok);
        assert_eq!(adm.reason, "centre not inside X");
    }

    #[test]
    fn blowup_first_chart_of_cusp() {
        let s = cusp_root();
        let centre = CentreDescription::at_origin(vec![0, 1, 2], 3);
        let mut seq = 0;
        let kids = blowup_charts(&s, &centre, &mut seq, None).unwrap();
        assert_eq!(kids.len(), 3);
        let zc = &kids[2];
        assert_eq!(zc.chart_id, "r.z");
        assert_eq!(zc.x_factors.len(), 1);
        assert_eq!(zc.x_factors[0].poly, p("z + x*y"));
        assert_eq!(zc.divisors.len(), 1);
        assert_eq!(zc.divisors[0].birth_year, 1);
        assert_eq!(zc.exc_multiplicities.get(&zc.divisors[0].id), Some(&1));
        assert_eq!(zc.controlled_ideal().unwrap(), p("z*(z + x*y)"));
    }

    #[test]
    fn blowup_second_chart_of_cusp() {
        let s = cusp_root();
        let centre = CentreDescription::at_origin(vec![0, 1, 2], 3);
        let mut seq = 0;
        let kids = blowup_charts(&s, &centre, &mut seq, None).unwrap();
        let zc = kids.into_iter().nth(2).unwrap();
        let kids2 = blowup_charts(&zc, &centre, &mut seq, None).unwrap();
        let xc = &kids2[0];
        assert_eq!(xc.controlled_ideal().unwrap(), p("x*z*(z + x*y)"));
        assert_eq!(xc.x_factors[0].poly, p("z + x*y"));
    }

    #[test]
    fn blowup_pair_second_year() {
        let pair = make_root_scene(vars(), vec![p("x"), p("x + y*z")], vec![], &[]).unwrap();
        let centre = CentreDescription::at_origin(vec![0, 1, 2], 3);
        let mut seq = 0;
        let kids = blowup_charts(&pair, &centre, &mut seq, None).unwrap();
        let yc = &kids[1];
        assert_eq!(yc.controlled_ideal().unwrap(), p("x*y*(x + y*z)"));
        let kids2 = blowup_charts(yc, &centre, &mut seq, None).unwrap();
        let yy = &kids2[1];
        assert_eq!(yy.controlled_ideal().unwrap(), p("x*y^2*(x + y*z)"));
    }

    #[test]
    fn shear_round_trip() {
        let s = cusp_root();
        let sheared = apply_shear(&s, 2, &p("x*y")).unwrap();
        // z -> z + xy sends z^3 + xy to (z - xy)^3 + xy.
        assert_eq!(
            sheared.x_factors[0].poly,
            p("(z - x*y)^3 + x*y")
        );
        let back = apply_shear(&sheared, 2, &p("-x*y")).unwrap();
        assert_eq!(back.x_factors[0].poly, s.x_factors[0].poly);
        // Zero shear is the identity.
        let same = apply_shear(&s, 2, &Poly::zero(3)).unwrap();
        assert_eq!(same.x_factors[0].poly, s.x_factors[0].poly);
        // Order at the origin is preserved.
        assert_eq!(
            sheared.x_factors[0].poly.ord_at_origin(),
            s.x_factors[0].poly.ord_at_origin()
        );
    }

    #[test]
    fn shear_on_divisor_scene() {
        // On the second-year chart of the cusp example, shearing by the cross
        // term turns the factor into a coordinate and rewrites the divisor.
        let vars3 = vars();
        let scene = Scene {
            chart_id: "t".into(),
            chart_seq: 0,
            year: 2,
            variables: vars3,
            x_factors: vec![XFactor { input_id: 0, poly: p("z + x*y") }],
            divisors: vec![DivisorComponent {
                id: "E1".into(),
                poly: p("z"),
                birth_year: 1,
                origin: DivisorOrigin::Exceptional,
            }],
            exc_multiplicities: BTreeMap::new(),
            parent: None,
            coordinate_changes: Vec::new(),
        };
        let sheared = apply_shear(&scene, 2, &p("x*y")).unwrap();
        assert_eq!(sheared.x_factors[0].poly, p("z"));
        assert_eq!(sheared.divisors[0].poly, p("z - x*y"));
    }

    #[test]
    fn scene_doc_round_trip() {
        let s = cusp_root();
        let doc = s.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let doc2: SceneDoc = serde_json::from_str(&json).unwrap();
        let s2 = Scene::from_doc(&doc2).unwrap();
        assert_eq!(s2.x_factors[0].poly, s.x_factors[0].poly);
        assert_eq!(serde_json::to_string(&s2.to_doc()).unwrap(), json);
    }

    #[test]
    fn offset_centre_blowup() {
        // Blowing up the point (0, 1, 0) on X = (x = 0).
        let s = make_root_scene(vars(), vec![p("x")], vec![], &[]).unwrap();
        let centre = CentreDescription {
            shears: vec![],
            coords: vec![0, 1, 2],
            offset: vec![rat_int(0), rat_int(1), rat_int(0)],
        };
        let mut seq = 0;
        let kids = blowup_charts(&s, &centre, &mut seq, None).unwrap();
        // The strict transform of (x = 0) misses its own chart.
        assert!(kids[0].x_factors.is_empty());
        // In the y-chart it survives, and the child origin maps back to the
        // centre point.
        assert_eq!(kids[1].x_factors[0].poly, p("x"));
        let back = map_point_to_parent(&kids[1], &[rat_int(0), rat_int(0), rat_int(0)]).unwrap();
        assert_eq!(back, vec![rat_int(0), rat_int(1), rat_int(0)]);
    }
}
