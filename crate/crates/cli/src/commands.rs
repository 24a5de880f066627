use qkz_core::algebra::{Rat, Scalar};
use qkz_core::classical::{compare_loop_algebra, expand_rll, jacobi_check, BracketTable, Identification};
use qkz_core::fusion::{qdet_check, qdet_multiplicativity, rll_sample_check, Relation, RllSample};
use qkz_core::qkz::{CoinvariantVector, LatticePath, QkzSystem, Step};
use qkz_core::report::CheckReport;
use qkz_core::rmatrix::{crossing_check, unitarity_check, ybe_check, Bare, HbarAffine, Normalized, RFamily, RMode};
use qkz_core::rng::Lcg64;
use qkz_core::{Error, Result};
use serde_json::json;

use crate::config::{nonzero_hbar, parse_rat, parse_rats, RunConfig};
use crate::output::RunReport;
use crate::{Cli, Command, ModeArgs, ModeName, SystemArgs};

const DEFAULT_ORDER: usize = 4;
const DEFAULT_TRIALS: usize = 20;
const POINT_BOUND: i64 = 20;

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ybe { .. } => "ybe",
        Command::Unitarity { .. } => "unitarity",
        Command::Crossing { .. } => "crossing",
        Command::Qdet { .. } => "qdet",
        Command::Rll { .. } => "rll",
        Command::Flatness { .. } => "flatness",
        Command::Transport { .. } => "transport",
        Command::Classical { .. } => "classical",
        Command::ReportAll { .. } => "report-all",
    }
}

pub fn execute(cli: &Cli) -> RunReport {
    let name = command_name(&cli.command);
    let cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => return RunReport::failed(name, cli.seed.unwrap_or(0), &e),
        },
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let mut ctx = Ctx { cfg, rng: Lcg64::new(seed), report: RunReport::new(name, seed) };
    match ctx.dispatch(&cli.command) {
        Ok(()) => ctx.report.finish(),
        Err(e) => RunReport::failed(name, seed, &e),
    }
}

#[derive(Clone)]
enum Family {
    Bare(Bare),
    Normalized(Normalized),
}

macro_rules! with_family {
    ($fam:expr, |$f:ident| $body:expr) => {
        match $fam {
            Family::Bare($f) => $body,
            Family::Normalized($f) => $body,
        }
    };
}

struct Ctx {
    cfg: RunConfig,
    rng: Lcg64,
    report: RunReport,
}

fn opt_rat(flag: &Option<String>, fallback: &Option<Rat>) -> Result<Option<Rat>> {
    match flag {
        Some(s) => parse_rat(s).map(Some),
        None => Ok(fallback.clone()),
    }
}

fn relations(flag: &Option<String>, fallback: &Option<String>) -> Result<Vec<Relation>> {
    match flag.as_ref().or(fallback.as_ref()) {
        None => Ok(Relation::ALL.to_vec()),
        Some(s) if s == "all" => Ok(Relation::ALL.to_vec()),
        Some(s) => s.parse().map(|r| vec![r]).map_err(|e: Error| Error::InvalidConfig(e.to_string())),
    }
}

fn points_json(points: &[HbarAffine]) -> serde_json::Value {
    json!(points.iter().map(|p| p.to_string()).collect::<Vec<_>>())
}

impl Ctx {
    fn dispatch(&mut self, command: &Command) -> Result<()> {
        match command {
            Command::Ybe { mode, u, v, trials } => self.ybe(mode, u, v, *trials),
            Command::Unitarity { mode, z, trials } => self.single_point("unitarity", mode, z, *trials),
            Command::Crossing { mode, z, trials } => self.single_point("crossing", mode, z, *trials),
            Command::Qdet { mode, system, t } => self.qdet(mode, system, t),
            Command::Rll { mode, system, relation, t, t_prime, i, j, central, trials } => {
                let rels = relations(relation, &self.cfg.relation)?;
                let sample = RllArgs {
                    t: opt_rat(t, &self.cfg.t)?,
                    t_prime: opt_rat(t_prime, &self.cfg.t_prime)?,
                    i: i.or(self.cfg.i),
                    j: j.or(self.cfg.j),
                    central: opt_rat(central, &self.cfg.central)?.unwrap_or_else(Rat::zero),
                    trials: trials.or(self.cfg.trials).unwrap_or(10),
                };
                let fam = self.family(mode)?;
                let (_, points) = self.system_points(system)?;
                self.rll(&fam, &rels, &points, &sample)
            }
            Command::Flatness { mode, system } => {
                let fam = self.family(mode)?;
                let (level, points) = self.system_points(system)?;
                with_family!(fam, |f| self.flatness(QkzSystem::from_rats(f, level, &points)?))
            }
            Command::Transport { mode, system, steps, vector } => {
                let fam = self.family(mode)?;
                let (level, points) = self.system_points(system)?;
                let path = match steps {
                    Some(s) => signed_steps(s)?,
                    None => self.cfg.path.clone().unwrap_or_default(),
                };
                let vector = match vector {
                    Some(v) => Some(parse_rats(v)?),
                    None => self.cfg.vector.clone(),
                };
                with_family!(fam, |f| self.transport(QkzSystem::from_rats(f, level, &points)?, &path, vector))
            }
            Command::Classical { relation, cutoff, identification } => {
                let rels = relations(relation, &self.cfg.relation)?;
                let cutoff = cutoff.or(self.cfg.cutoff).unwrap_or(2);
                let id = match identification.as_ref().or(self.cfg.identification.as_ref()).map(String::as_str) {
                    None | Some("signed") => Identification::Signed,
                    Some("transposed") => Identification::Transposed,
                    Some("direct") => Identification::Direct,
                    Some(other) => {
                        return Err(Error::InvalidConfig(format!(
                            "identification must be signed, transposed or direct, got {other:?}"
                        )))
                    }
                };
                self.classical(&rels, cutoff, id)
            }
            Command::ReportAll { trials } => self.report_all(trials.or(self.cfg.trials).unwrap_or(DEFAULT_TRIALS)),
        }
    }

    fn mode(&self, args: &ModeArgs) -> Result<RMode> {
        let configured = self.cfg.system.as_ref().and_then(|s| s.mode).or(self.cfg.mode);
        let configured_order = match configured {
            Some(RMode::Normalized { order }) => Some(order),
            _ => None,
        };
        let mode = match (args.mode, args.order) {
            (Some(ModeName::Bare), Some(_)) => {
                return Err(Error::InvalidConfig("--order applies to normalized mode only".into()))
            }
            (Some(ModeName::Bare), None) => RMode::Bare,
            (Some(ModeName::Normalized), o) => {
                RMode::Normalized { order: o.or(configured_order).unwrap_or(DEFAULT_ORDER) }
            }
            (None, Some(order)) => RMode::Normalized { order },
            (None, None) => configured.unwrap_or(RMode::Bare),
        };
        mode.validate()
    }

    fn hbar(&self, args: &ModeArgs) -> Result<Rat> {
        let configured = self.cfg.system.as_ref().and_then(|s| s.hbar.clone()).or(self.cfg.hbar.clone());
        nonzero_hbar(opt_rat(&args.hbar, &configured)?.unwrap_or_else(Rat::one))
    }

    fn family(&self, args: &ModeArgs) -> Result<Family> {
        Ok(match self.mode(args)? {
            RMode::Bare => Family::Bare(Bare { hbar: self.hbar(args)? }),
            RMode::Normalized { order } => Family::Normalized(Normalized { order }),
        })
    }

    /// Level and points from flags, then the config file, then the seed.
    fn system_points(&mut self, args: &SystemArgs) -> Result<(Rat, Vec<Rat>)> {
        let sys = self.cfg.system.clone().unwrap_or_default();
        let level = opt_rat(&args.level, &sys.level)?.unwrap_or_else(Rat::zero);
        let n = args.n.or(sys.n);
        let points = match &args.points {
            Some(p) => parse_rats(p)?,
            None if !sys.points.is_empty() => sys.points.clone(),
            None => self.random_points(n.unwrap_or(3))?,
        };
        if let Some(n) = n {
            if n != points.len() {
                return Err(Error::InvalidConfig(format!("n = {n} but {} points given", points.len())));
            }
        }
        self.report.data("level", level.to_string());
        Ok((level, points))
    }

    fn random_points(&mut self, n: usize) -> Result<Vec<Rat>> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 points, got {n}")));
        }
        let mut pts: Vec<Rat> = Vec::with_capacity(n);
        while pts.len() < n {
            let p = self.rng.rat(POINT_BOUND);
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        Ok(pts)
    }

    /// Runs `check` on `trials` random draws, redrawing on poles.
    fn sample(&mut self, trials: usize, mut check: impl FnMut(&mut Lcg64) -> Result<CheckReport>) -> Result<()> {
        let mut skipped = 0usize;
        let mut done = 0usize;
        while done < trials {
            match check(&mut self.rng) {
                Ok(rep) => {
                    self.report.push(rep);
                    done += 1;
                }
                Err(e) if e.is_pole() && skipped < 100 * trials.max(1) => skipped += 1,
                Err(e) => return Err(e),
            }
        }
        self.report.data("skipped_poles", skipped);
        Ok(())
    }

    fn ybe(&mut self, args: &ModeArgs, u: &Option<String>, v: &Option<String>, trials: Option<usize>) -> Result<()> {
        let mode = self.mode(args)?;
        let hbar = self.hbar(args)?;
        match (opt_rat(u, &self.cfg.u)?, opt_rat(v, &self.cfg.v)?) {
            (Some(u), Some(v)) => {
                let rep = ybe_check(mode, &u, &v, &hbar)?;
                self.report.push(rep);
                Ok(())
            }
            (None, None) => {
                let n = trials.or(self.cfg.trials).unwrap_or(DEFAULT_TRIALS);
                self.sample(n, |g| ybe_check(mode, &g.rat(1000), &g.rat(1000), &hbar))
            }
            _ => Err(Error::InvalidConfig("--u and --v must be given together".into())),
        }
    }

    fn single_point(&mut self, which: &str, args: &ModeArgs, z: &Option<String>, trials: Option<usize>) -> Result<()> {
        let mode = self.mode(args)?;
        let hbar = self.hbar(args)?;
        let check = if which == "crossing" { crossing_check } else { unitarity_check };
        match opt_rat(z, &self.cfg.z)? {
            Some(z) => {
                let rep = check(mode, &z, &hbar)?;
                self.report.push(rep);
                Ok(())
            }
            None => {
                let n = trials.or(self.cfg.trials).unwrap_or(DEFAULT_TRIALS);
                self.sample(n, |g| check(mode, &g.nonzero_rat(1000), &hbar))
            }
        }
    }

    fn qdet(&mut self, args: &ModeArgs, system: &SystemArgs, t: &Option<String>) -> Result<()> {
        let mode = self.mode(args)?;
        let hbar = self.hbar(args)?;
        self.report.push(qdet_check(mode, &hbar)?);
        let has_system = system.points.is_some() || system.n.is_some() || self.cfg.system.is_some();
        if has_system {
            let (_, points) = self.system_points(system)?;
            let t = match opt_rat(t, &self.cfg.t)? {
                Some(t) => t,
                None => points.iter().fold(Rat::one(), |acc, p| &acc + &p.abs()),
            };
            self.report.push(qdet_multiplicativity(mode, &hbar, &t, &points)?);
        }
        Ok(())
    }

    fn rll(&mut self, fam: &Family, rels: &[Relation], points: &[Rat], a: &RllArgs) -> Result<()> {
        let n = points.len();
        let (i, j) = (a.i.unwrap_or(1), a.j.unwrap_or(n));
        let pts: Vec<HbarAffine> = points.iter().cloned().map(HbarAffine::constant).collect();
        let make = |t: Rat, tp: Rat| RllSample {
            points: pts.clone(),
            t: HbarAffine::constant(t),
            t_prime: HbarAffine::constant(tp),
            i,
            j,
            central: a.central.clone(),
            misorder: false,
        };
        for &rel in rels {
            match (&a.t, &a.t_prime) {
                (Some(t), Some(tp)) => {
                    let s = make(t.clone(), tp.clone());
                    let rep = with_family!(fam, |f| rll_sample_check(f, rel, &s))?;
                    self.report.push(rep);
                }
                (None, None) => {
                    self.sample(a.trials, |g| {
                        let s = make(g.rat(30), g.rat(30));
                        with_family!(fam, |f| rll_sample_check(f, rel, &s))
                    })?;
                }
                _ => return Err(Error::InvalidConfig("--t and --t-prime must be given together".into())),
            }
        }
        Ok(())
    }

    fn flatness<F: RFamily>(&mut self, sys: QkzSystem<F>) -> Result<()> {
        let n = sys.n();
        let mut pairs = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                let rep = sys.flatness_check(i, j)?;
                pairs.push(json!({ "i": i, "j": j, "pass": rep.pass }));
                self.report.push(rep);
            }
        }
        self.report.data("points", points_json(sys.points()));
        self.report.data("pairs", pairs);
        if sys.degenerate_step() {
            self.report.data("degenerate_step", true);
        }
        Ok(())
    }

    fn transport<F: RFamily>(&mut self, sys: QkzSystem<F>, path: &LatticePath, vector: Option<Vec<Rat>>) -> Result<()> {
        let n = sys.n();
        let comps = vector.unwrap_or_else(|| (0..1usize << n).map(|k| if k == 0 { Rat::one() } else { Rat::zero() }).collect());
        let v = CoinvariantVector::new(comps.iter().map(F::S::from_rat).collect(), n)?;
        let (w, end) = sys.transport(path, &v)?;
        self.report.data("steps", path.steps.len());
        self.report.data("initial_points", points_json(sys.points()));
        self.report.data("points", points_json(end.points()));
        self.report.data("initial_vector", json!(comps.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
        self.report.data("vector", json!(w.components().iter().map(|c| c.to_string()).collect::<Vec<_>>()));
        Ok(())
    }

    fn classical(&mut self, rels: &[Relation], cutoff: i64, id: Identification) -> Result<()> {
        let mut tables = Vec::new();
        let mut json_tables = serde_json::Map::new();
        for &rel in rels {
            let t = expand_rll(rel, cutoff)?;
            self.report.push(compare_loop_algebra(&t, id));
            json_tables.insert(rel.name().into(), t.to_json());
            tables.push(t);
        }
        let merged = BracketTable::merge(&tables.iter().collect::<Vec<_>>());
        let jac = jacobi_check(&merged);
        if jac.details["triples_checked"] != 0 {
            self.report.push(jac);
        }
        self.report.data("tables", serde_json::Value::Object(json_tables));
        Ok(())
    }

    fn report_all(&mut self, trials: usize) -> Result<()> {
        let h = Rat::one();
        self.sample(trials, |g| ybe_check(RMode::Bare, &g.rat(1000), &g.rat(1000), &g.nonzero_rat(1000)))?;
        self.sample(trials, |g| unitarity_check(RMode::Bare, &g.rat(1000), &g.nonzero_rat(1000)))?;
        self.sample(trials, |g| crossing_check(RMode::Normalized { order: DEFAULT_ORDER }, &g.nonzero_rat(100), &h))?;
        let control = crossing_check(RMode::Bare, &h, &h)?;
        let ratio_ok = control.details.get("ratio").and_then(|v| v.as_str()) == Some("4/3");
        let mut ctrl = CheckReport::new("crossing_bare_control", RMode::Bare)
            .param("hbar", &h)
            .param("z", &h)
            .detail("identity_fails", !control.pass)
            .detail("ratio", control.details.get("ratio").cloned().unwrap_or_default());
        ctrl.pass = !control.pass && ratio_ok;
        self.report.push(ctrl);
        self.report.push(qdet_check(RMode::Bare, &h)?);
        self.report.push(qdet_check(RMode::Normalized { order: DEFAULT_ORDER }, &h)?);

        let (bare, points) = self.admissible_system(3)?;
        let fam = Family::Bare(bare.family().clone());
        let args = RllArgs { t: None, t_prime: None, i: Some(1), j: Some(3), central: Rat::zero(), trials: 3 };
        self.rll(&fam, &Relation::ALL, &points, &args)?;
        self.flatness(bare.clone())?;
        let path = LatticePath::rectangle(1, 2, 2, 1);
        let v = CoinvariantVector::new((0..8).map(|_| self.rng.rat(9)).collect(), 3)?;
        let mut rect = CheckReport::new("transport_rectangle", RMode::Bare)
            .param("hbar", &bare.family().hbar)
            .param("points", points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", "))
            .param("path", "rectangle(1, 2, 2, 1)");
        rect.pass = match bare.transport(&path, &v) {
            Ok((w, end)) => w == v && end.points() == bare.points(),
            Err(e) if e.is_pole() => {
                rect = rect.detail("pole", e.to_string());
                false
            }
            Err(e) => return Err(e),
        };
        self.report.push(rect);
        let norm = QkzSystem::from_rats(Normalized { order: 3 }, Rat::one(), &points[..2])?;
        self.report.push(norm.flatness_check(1, 2)?);
        self.classical(&Relation::ALL, 2, Identification::Signed)
    }

    /// A bare system whose plaquettes and test rectangle meet no pole.
    fn admissible_system(&mut self, n: usize) -> Result<(QkzSystem<Bare>, Vec<Rat>)> {
        for _ in 0..100 {
            let hbar = self.rng.nonzero_rat(10);
            let level = Rat::from_int(self.rng.range(0, 4));
            let points = self.random_points(n)?;
            let sys = QkzSystem::from_rats(Bare { hbar }, level, &points)?;
            let ok = (1..=n).all(|i| (i + 1..=n).all(|j| sys.plaquette_check(i, j).is_ok()));
            let probe = CoinvariantVector::new(vec![Rat::one(); 1 << n], n)?;
            if ok && sys.transport(&LatticePath::rectangle(1, 2, 2, 1), &probe).is_ok() {
                return Ok((sys, points));
            }
        }
        Err(Error::PoleEncountered("no admissible random system in 100 draws".into()))
    }
}

struct RllArgs {
    t: Option<Rat>,
    t_prime: Option<Rat>,
    i: Option<usize>,
    j: Option<usize>,
    central: Rat,
    trials: usize,
}

fn signed_steps(raw: &[i64]) -> Result<LatticePath> {
    raw.iter()
        .map(|&s| match s {
            0 => Err(Error::InvalidConfig("step 0 is not a leg; use +i or -i".into())),
            s => Ok(Step { i: s.unsigned_abs() as usize, sign: if s > 0 { 1 } else { -1 } }),
        })
        .collect::<Result<Vec<_>>>()
        .map(LatticePath::new)
}
