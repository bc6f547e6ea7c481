use anyhow::{anyhow, bail, Context, Result};
use num_rational::BigRational;
use num_traits::One;
use p1energy::bounds::{general_bound, Place, PlaceSpec};
use p1energy::checks::{corpus, run_checks, CheckConfig};
use p1energy::equilibrium::{
    minimal_energy_padic, minimal_energy_padic_series, minimal_energy_real,
    minimal_energy_real_series, potential_real, EquilibriumSampler, PadicEquilibrium,
};
use p1energy::heights::{
    is_irreducible, is_totally_real, is_zero_or_root_of_unity, local_discrepancy_arch,
    local_discrepancy_arch_via_disc, local_discrepancy_padic, padic_root_pointset, search_l_s,
    splits_at, sturm_real_roots, verify_product_formula, weil_height, SearchConfig,
};
use p1energy::metric::{
    discrepancy, discrete_potential, mc_energy_estimate, sample_batch, FieldContext, PointSet,
    ProjectivePoint,
};
use p1energy::padic::{is_totally_split, prime_power};
use p1energy::poly::IntPolynomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{col, log_col, Cell, Table};
use crate::{Cli, Command, FieldArgs};

const DEFAULT_TOL: f64 = 1e-9;

/// Runs the selected command. The flag is false when a check inside the
/// command failed.
pub fn dispatch(cli: &Cli) -> Result<(Table, bool)> {
    let seed = cli.seed;
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    match &cli.command {
        Command::Energy { field, q } => energy(field, *q).map(|t| (t, true)),
        Command::Sample { field, n } => sample(field, *n, seed).map(|t| (t, true)),
        Command::Potential { field, x, n } => potential(field, x, *n, seed).map(|t| (t, true)),
        Command::Converge { field, n_max } => converge(field, *n_max, seed).map(|t| (t, true)),
        Command::Equidist { p, degree, polys, coeff_max, precision } => {
            equidist(*p, *degree, *polys, *coeff_max, *precision, seed).map(|t| (t, true))
        }
        Command::Height { poly } => height(poly).map(|t| (t, true)),
        Command::SplitCheck { poly, places } => split_check(poly, places).map(|t| (t, true)),
        Command::DiscrepancyLocal { poly, place, precision } => {
            discrepancy_local(poly, place, *precision, tol)
        }
        Command::Bound { primes, arch, field_degrees, arch_degree } => {
            bound(primes, *arch, field_degrees, arch_degree.as_deref()).map(|t| (t, true))
        }
        Command::VerifyIdentity { poly, corpus } => verify_identity(poly.as_deref(), *corpus, seed, tol),
        Command::Search { places, degree_max, coeff_max, padic_precision, nontrivial_only } => search(
            places,
            *degree_max,
            *coeff_max,
            *padic_precision,
            *nontrivial_only,
            tol,
        ),
        Command::AllChecks { quick } => all_checks(*quick),
    }
}

fn parse_poly(s: &str) -> Result<IntPolynomial> {
    s.parse::<IntPolynomial>().with_context(|| format!("polynomial {s:?}"))
}

fn parse_place(s: &str) -> Result<Place> {
    s.trim().parse::<Place>().with_context(|| format!("place {s:?}"))
}

fn context(field: &FieldArgs) -> Result<FieldContext> {
    Ok(match field.p {
        Some(p) => FieldContext::padic(p, field.precision)?,
        None => FieldContext::Archimedean,
    })
}

fn field_name(ctx: FieldContext) -> String {
    match ctx {
        FieldContext::Archimedean => "R".into(),
        FieldContext::Padic { prime, .. } => format!("Q_{prime}"),
    }
}

fn energy(field: &FieldArgs, q: Option<u64>) -> Result<Table> {
    let q = q.or(field.p);
    let mut t = Table::new(
        "energy",
        "real: 7*zeta(3)/(2*pi^2); residue field size q: q*log(q)/(q^2-1)",
        vec![col("field"), log_col("energy"), log_col("series"), col("exact")],
    );
    match q {
        None => t.push(vec![
            "R".into(),
            Cell::Log(minimal_energy_real()),
            Cell::Log(minimal_energy_real_series()),
            "7*zeta(3)/(2*pi^2)".into(),
        ]),
        Some(q) => {
            let (p, k) = prime_power(q).ok_or_else(|| anyhow!("{q} is not a prime power"))?;
            let name = if k == 1 { format!("Q_{p}") } else { format!("q={q}") };
            t.push(vec![
                name.into(),
                Cell::Log(minimal_energy_padic(q)?),
                Cell::Log(minimal_energy_padic_series(q)?),
                format!("{q}*log({q})/{}", q * q - 1).into(),
            ]);
        }
    }
    Ok(t)
}

fn residue_class(x: &ProjectivePoint) -> Result<String> {
    match x {
        ProjectivePoint::Padic { x0, x1 } => {
            if !x1.is_unit() {
                return Ok("inf".into());
            }
            Ok(x0.div(x1)?.residue(1)?.to_string())
        }
        ProjectivePoint::Archimedean { .. } => bail!("residue classes need a p-adic point"),
    }
}

fn sample(field: &FieldArgs, n: usize, seed: u64) -> Result<Table> {
    let ctx = context(field)?;
    let s = EquilibriumSampler::for_context(ctx)?;
    let pts = sample_batch(&s, n, seed)?;
    let formula = format!("equilibrium measure on P^1({})", field_name(ctx));
    let mut t = match ctx {
        FieldContext::Archimedean => Table::new("sample", formula, vec![col("index"), col("x")]),
        FieldContext::Padic { .. } => Table::new(
            "sample",
            formula,
            vec![col("index"), col("x0"), col("x1"), col("residue_class")],
        ),
    };
    for (i, x) in pts.iter().enumerate() {
        match ctx {
            FieldContext::Archimedean => {
                let v = x.to_real().ok_or_else(|| anyhow!("non-real sample"))?;
                t.push(vec![i.into(), Cell::Num(v)]);
            }
            FieldContext::Padic { .. } => {
                let ProjectivePoint::Padic { x0, x1 } = x else {
                    bail!("non-p-adic sample");
                };
                t.push(vec![
                    i.into(),
                    x0.to_string().into(),
                    x1.to_string().into(),
                    residue_class(x)?.into(),
                ]);
            }
        }
    }
    t.meta("seed", seed);
    Ok(t)
}

fn potential(field: &FieldArgs, xs: &[String], n: usize, seed: u64) -> Result<Table> {
    let ctx = context(field)?;
    let defaults: &[&str] = match ctx {
        FieldContext::Archimedean => &["0", "0.3", "0.5", "2", "5", "-7"],
        FieldContext::Padic { .. } => &["0", "1", "inf"],
    };
    let owned: Vec<String>;
    let xs = if xs.is_empty() {
        owned = defaults.iter().map(|s| s.to_string()).collect();
        &owned
    } else {
        xs
    };
    let cols = vec![col("x"), log_col("potential"), log_col("energy"), log_col("difference")];
    match ctx {
        FieldContext::Archimedean => {
            let e = minimal_energy_real();
            let mut t = Table::new("potential", "integral of -log delta(x, y) dmu_R(y)", cols);
            for s in xs {
                let x: f64 = s.trim().parse().with_context(|| format!("point {s:?}"))?;
                let v = potential_real(x)?;
                t.push(vec![Cell::Num(x), Cell::Log(v), Cell::Log(e), Cell::Log(v - e)]);
            }
            Ok(t)
        }
        FieldContext::Padic { prime, precision } => {
            let e = minimal_energy_padic(prime)?;
            let z = PointSet::new(sample_batch(&PadicEquilibrium::new(prime, precision)?, n, seed)?)?;
            let mut t = Table::new(
                "potential",
                format!("(1/N) sum -log delta(x, y_i) over N equilibrium samples y_i in P^1(Q_{prime})"),
                cols,
            );
            for s in xs {
                let s = s.trim();
                let x = if matches!(s, "inf" | "infinity") {
                    ProjectivePoint::padic_infinity(prime, precision)?
                } else {
                    let k: i64 = s.parse().with_context(|| format!("integer point {s:?}"))?;
                    ProjectivePoint::padic_integer(k, prime, precision)?
                };
                let v = discrete_potential(&z, &x)?;
                t.push(vec![s.into(), Cell::Log(v), Cell::Log(e), Cell::Log(v - e)]);
            }
            t.meta("samples", n);
            t.meta("seed", seed);
            Ok(t)
        }
    }
}

/// `2, 4, 8, ...` below `n_max`, then `n_max`.
pub fn ladder(n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 2;
    while n < n_max {
        out.push(n);
        n *= 2;
    }
    out.push(n_max);
    out
}

fn converge(field: &FieldArgs, n_max: usize, seed: u64) -> Result<Table> {
    if n_max < 2 {
        bail!("--n-max must be at least 2");
    }
    let ctx = context(field)?;
    let s = EquilibriumSampler::for_context(ctx)?;
    let target = s.minimal_energy()?;
    let mut t = Table::new(
        "converge",
        format!(
            "D(Z_N) = sum over ordered pairs of -log delta / (N(N-1)), Z_N the first N equilibrium samples in P^1({})",
            field_name(ctx)
        ),
        vec![col("n"), log_col("discrepancy"), log_col("energy"), log_col("difference")],
    );
    for n in ladder(n_max) {
        let d = mc_energy_estimate(&s, n, seed)?;
        t.push(vec![n.into(), Cell::Log(d), Cell::Log(target), Cell::Log(d - target)]);
    }
    t.meta("seed", seed);
    Ok(t)
}

const MAX_EQUIDIST_ATTEMPTS: usize = 10_000_000;

fn equidist(
    p: u64,
    degree: usize,
    polys: usize,
    coeff_max: i64,
    precision: u32,
    seed: u64,
) -> Result<Table> {
    if degree < 2 || coeff_max < 1 || polys == 0 {
        bail!("need degree >= 2, coeff-max >= 1 and polys >= 1");
    }
    FieldContext::padic(p, precision)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; p as usize + 1];
    let mut found = 0;
    let mut attempts = 0;
    while found < polys {
        attempts += 1;
        if attempts > MAX_EQUIDIST_ATTEMPTS {
            bail!("only {found} totally split polynomials in {MAX_EQUIDIST_ATTEMPTS} draws");
        }
        let mut c: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-coeff_max..=coeff_max)).collect();
        if c[degree] == 0 {
            continue;
        }
        c[degree] = c[degree].abs();
        let f = IntPolynomial::from_i64s(&c)?;
        if !f.is_squarefree() || !is_totally_split(&f, p)? {
            continue;
        }
        for x in padic_root_pointset(&f, p, precision)?.points() {
            let class = residue_class(x)?;
            let idx = if class == "inf" { p as usize } else { class.parse::<usize>()? };
            counts[idx] += 1;
        }
        found += 1;
    }
    let total: usize = counts.iter().sum();
    let target = 1.0 / (p + 1) as f64;
    let expected = total as f64 * target;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let mut t = Table::new(
        "equidist",
        format!("roots of random totally split degree-{degree} polynomials over Q_{p}, binned by residue class in P^1(F_{p}); target 1/(p+1)"),
        vec![col("class"), col("count"), col("frequency"), col("target")],
    );
    for (i, &c) in counts.iter().enumerate() {
        let name = if i == p as usize { "inf".to_string() } else { i.to_string() };
        t.push(vec![name.into(), c.into(), Cell::Num(c as f64 / total as f64), Cell::Num(target)]);
    }
    t.meta("polynomials", found);
    t.meta("draws", attempts);
    t.meta("roots", total);
    t.meta("chi2", Cell::Num(chi2));
    t.meta("chi2_dof", p);
    t.meta("seed", seed);
    Ok(t)
}

fn height(poly: &str) -> Result<Table> {
    let f = parse_poly(poly)?;
    let mut t = Table::new(
        "height",
        "h = (1/n)(log|a_n| + sum log+|alpha_i|) on the primitive part",
        vec![
            col("poly"),
            col("degree"),
            log_col("height"),
            col("irreducible"),
            col("zero_or_root_of_unity"),
            col("real_roots"),
            col("totally_real"),
        ],
    );
    let irreducible = is_irreducible(&f)?;
    let torsion = if irreducible { Cell::Bool(is_zero_or_root_of_unity(&f)?) } else { Cell::Empty };
    t.push(vec![
        f.to_string().into(),
        f.degree().into(),
        Cell::Log(weil_height(&f)?),
        irreducible.into(),
        torsion,
        sturm_real_roots(&f)?.into(),
        is_totally_real(&f)?.into(),
    ]);
    Ok(t)
}

fn split_check(poly: &str, places: &[String]) -> Result<Table> {
    let f = parse_poly(poly)?;
    f.require_squarefree()?;
    let mut t = Table::new(
        "split-check",
        "f splits completely over the completion: all roots in P^1(R) or P^1(Q_p)",
        vec![col("poly"), col("place"), col("splits")],
    );
    for s in places {
        let place = parse_place(s)?;
        t.push(vec![f.to_string().into(), place.to_string().into(), splits_at(&f, place)?.into()]);
    }
    Ok(t)
}

fn discrepancy_local(poly: &str, place: &str, precision: u32, tol: f64) -> Result<(Table, bool)> {
    let f = parse_poly(poly)?;
    let place = parse_place(place)?;
    let cols = vec![
        col("poly"),
        col("place"),
        log_col("discrepancy"),
        col("exact"),
        log_col("cross_check"),
        col("agree"),
    ];
    match place {
        Place::Infinite => {
            let v = local_discrepancy_arch(&f)?.value;
            let w = local_discrepancy_arch_via_disc(&f)?;
            let agree = (v - w).abs() <= tol;
            let mut t = Table::new(
                "discrepancy-local",
                "D_inf = (1/(n(n-1))) sum_{i!=j} [-log|a_i-a_j| + log+|a_i| + log+|a_j|]; cross-check from the discriminant",
                cols,
            );
            t.push(vec![
                f.to_string().into(),
                "inf".into(),
                Cell::Log(v),
                Cell::Empty,
                Cell::Log(w),
                agree.into(),
            ]);
            Ok((t, agree))
        }
        Place::Finite(p) => {
            let r = local_discrepancy_padic(&f, p)?;
            let exact = r.exact.clone().ok_or_else(|| anyhow!("missing exact value"))?;
            let (check, agree) = if is_totally_split(&f, p)? {
                let d = discrepancy(&padic_root_pointset(&f, p, precision)?)?;
                (Cell::Log(d.value), Cell::Bool(d.exact.as_ref() == Some(&exact)))
            } else {
                (Cell::Empty, Cell::Empty)
            };
            let ok = !matches!(agree, Cell::Bool(false));
            let mut t = Table::new(
                "discrepancy-local",
                "D_p = [(ord_p disc - (2n-2) ord_p a_n)/(n(n-1)) + (2/n) sum max(0, -ord_p alpha_i)] log p; cross-check from Hensel-lifted roots when f splits",
                cols,
            );
            t.push(vec![
                f.to_string().into(),
                p.to_string().into(),
                Cell::Log(r.value),
                exact.to_string().into(),
                check,
                agree,
            ]);
            Ok((t, ok))
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim().parse::<BigRational>().map_err(|e| anyhow!("local degree {s:?}: {e}"))
}

/// `P:e,f,N[,q]`.
fn parse_field_degrees(s: &str) -> Result<PlaceSpec> {
    let (p, rest) = s.split_once(':').ok_or_else(|| anyhow!("expected P:e,f,N[,q], got {s:?}"))?;
    let p: u64 = p.trim().parse().with_context(|| format!("prime in {s:?}"))?;
    let parts: Vec<&str> = rest.split(',').collect();
    if !(3..=4).contains(&parts.len()) {
        bail!("expected P:e,f,N[,q], got {s:?}");
    }
    let e: u32 = parts[0].trim().parse().with_context(|| format!("e in {s:?}"))?;
    let f: u32 = parts[1].trim().parse().with_context(|| format!("f in {s:?}"))?;
    let n = parse_rational(parts[2])?;
    let q: u64 = match parts.get(3) {
        Some(q) => q.trim().parse().with_context(|| format!("q in {s:?}"))?,
        None => p,
    };
    Ok(PlaceSpec::finite(p, n, q, e, f)?)
}

fn bound(
    primes: &[u64],
    arch: bool,
    field_degrees: &[String],
    arch_degree: Option<&str>,
) -> Result<Table> {
    let mut specs = primes.iter().map(|&p| PlaceSpec::rational_prime(p)).collect::<Result<Vec<_>, _>>()?;
    for s in field_degrees {
        specs.push(parse_field_degrees(s)?);
    }
    match arch_degree {
        Some(n) => specs.push(PlaceSpec::archimedean(parse_rational(n)?)?),
        None if arch => specs.push(PlaceSpec::archimedean(BigRational::one())?),
        None => {}
    }
    let r = general_bound(&specs)?;
    let mut t = Table::new(
        "bound",
        "finite v: N_v q_v^f_v / (2 e_v (q_v^(2 f_v) - 1)) log p_v; real v: N_v (7/4) zeta(3)/pi^2; bound = sum over S",
        vec![
            col("place"),
            col("local_degree"),
            col("q"),
            col("e"),
            col("f"),
            log_col("contribution"),
            col("exact"),
        ],
    );
    let opt = |x: Option<u64>| x.map_or(Cell::Empty, Cell::from);
    for term in &r.contributions {
        let s = &term.place;
        t.push(vec![
            s.place.to_string().into(),
            s.local_degree.to_string().into(),
            opt(s.residue_size),
            opt(s.ramification.map(u64::from)),
            opt(s.inertia.map(u64::from)),
            Cell::Log(term.value),
            term.exact.to_string().into(),
        ]);
    }
    t.push(vec![
        "total".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Log(r.total),
        Cell::Empty,
    ]);
    t.meta("bound", Cell::Log(r.total));
    if let Some(v) = r.bombieri_zannier {
        t.meta("bombieri_zannier", Cell::Log(v));
    }
    if let Some(v) = r.schinzel {
        t.meta("schinzel", Cell::Log(v));
    }
    if let Some(v) = r.upper {
        t.meta("upper", Cell::Log(v));
    }
    Ok(t)
}

fn verify_identity(poly: Option<&str>, size: usize, seed: u64, tol: f64) -> Result<(Table, bool)> {
    let polys = match poly {
        Some(s) => vec![parse_poly(s)?],
        None => corpus(size, seed),
    };
    let mut t = Table::new(
        "verify-identity",
        "2h = D_inf + sum over p | a_n disc of D_p",
        vec![
            col("poly"),
            log_col("height"),
            log_col("archimedean"),
            log_col("finite"),
            col("primes"),
            log_col("residual"),
            col("pass"),
        ],
    );
    let mut all = true;
    for f in &polys {
        let c = verify_product_formula(f)?;
        let pass = c.residual.abs() <= tol;
        all &= pass;
        let primes: Vec<String> = c.finite.iter().map(|r| r.place.to_string()).collect();
        t.push(vec![
            f.to_csv_string().into(),
            Cell::Log(c.height),
            Cell::Log(c.archimedean.value),
            Cell::Log(c.finite.iter().map(|r| r.value).sum()),
            primes.join(" ").into(),
            Cell::Log(c.residual),
            pass.into(),
        ]);
    }
    t.meta("polynomials", polys.len());
    t.meta("tolerance", Cell::Num(tol));
    Ok((t, all))
}

fn search(
    places: &[String],
    degree_max: usize,
    coeff_max: i64,
    padic_precision: Option<u32>,
    nontrivial_only: bool,
    tol: f64,
) -> Result<(Table, bool)> {
    let places = places.iter().map(|s| parse_place(s)).collect::<Result<Vec<_>>>()?;
    let r = search_l_s(&SearchConfig { places, degree_max, coeff_max, padic_precision })?;
    let mut t = Table::new(
        "search",
        "h = (1/n)(log|a_n| + sum log+|alpha_i|) over canonical primitive squarefree f splitting at every place of S",
        vec![
            col("coefficients"),
            col("poly"),
            col("degree"),
            log_col("height"),
            col("irreducible"),
            col("nontrivial"),
            col("local_discrepancies"),
            col("below_bound"),
        ],
    );
    for h in r.hits.iter().filter(|h| h.nontrivial || !nontrivial_only) {
        let local: Vec<String> = h
            .local
            .iter()
            .map(|l| match &l.exact {
                Some(e) => format!("{}={e}", l.place),
                None => format!("{}={}", l.place, l.value),
            })
            .collect();
        t.push(vec![
            h.poly.to_csv_string().into(),
            h.poly.to_string().into(),
            h.degree.into(),
            Cell::Log(h.height),
            h.irreducible.into(),
            h.nontrivial.into(),
            local.join(";").into(),
            (h.nontrivial && h.height < r.bound - tol).into(),
        ]);
    }
    let violations = r.violations(tol).len();
    let places: Vec<String> = r.places.iter().map(|p| p.to_string()).collect();
    t.meta("places", places.join(","));
    t.meta("degree_max", r.degree_max);
    t.meta("coeff_max", Cell::Int(r.coeff_max));
    t.meta("examined", r.examined);
    t.meta("hits", r.hits.len());
    t.meta("bound", Cell::Log(r.bound));
    t.meta("min_height", r.min_height.map_or(Cell::Empty, Cell::Log));
    t.meta("min_poly", r.min_poly.as_ref().map_or(Cell::Empty, |f| f.to_string().into()));
    t.meta("violations", violations);
    Ok((t, violations == 0))
}

fn all_checks(quick: bool) -> Result<(Table, bool)> {
    let results = run_checks(&CheckConfig { quick, ..Default::default() });
    let mut t = Table::new(
        "all-checks",
        "acceptance criteria 1-11",
        vec![col("criterion"), col("name"), col("pass"), col("seconds"), col("budget_seconds"), col("detail")],
    );
    for r in &results {
        eprintln!("{r}");
        t.push(vec![
            r.id.into(),
            r.name.into(),
            r.pass.into(),
            Cell::Num(r.seconds),
            r.budget_seconds.map_or(Cell::Empty, Cell::Num),
            r.detail.clone().into(),
        ]);
    }
    let ok = results.iter().all(|r| r.pass);
    t.meta("quick", quick);
    t.meta("passed", results.iter().filter(|r| r.pass).count());
    t.meta("failed", results.iter().filter(|r| !r.pass).count());
    Ok((t, ok))
}
