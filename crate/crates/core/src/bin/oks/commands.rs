use std::path::PathBuf;

use clap::{ArgAction, Args};
use serde::Serialize;

use oks_core::bounds::{dict_tail_bound, moment_bound, sample_threshold, Threshold};
use oks_core::harness::{
    gaussian_quadratic_moment, growth_experiment, mc_det_moment, mc_expected_gram_det, mc_kstar_tail, nystrom_compare,
    regression_experiment, Exec, NystromRecord, RegressionRecord, Sampler, SamplerKind, EXACT_SLACK,
};
use oks_core::io::{read_table, spectrum_to_csv, SpectrumSource};
use oks_core::regress::{evaluate, fit};
use oks_core::sparsifier::run_stream;
use oks_core::spectrum::{empirical_spectrum, spectrum_l1_gap};
use oks_core::symfun::{esp_brute, esp_table, nu_geometric};
use oks_core::{gram, Error, KernelSpec, LogValue, Result, Spectrum, DEFAULT_CLAMP_TOL};

use crate::{Common, Report};

/// Standard errors allowed between an estimate and its reference.
const Z: f64 = 3.0;

fn kernel(text: &str) -> Result<KernelSpec> {
    text.parse()
}

fn sampler_inputs(text: &str) -> Vec<PathBuf> {
    text.strip_prefix("dataset:").map(|p| vec![PathBuf::from(p)]).unwrap_or_default()
}

/// The exact covariance spectrum when the kernel is linear on a diag sampler.
fn exact_spectrum<'a>(sampler: &'a Sampler, kernel: &KernelSpec) -> Option<&'a Spectrum> {
    match (&sampler.kind, kernel) {
        (SamplerKind::DiagGaussian(s), KernelSpec::Linear) => Some(s),
        _ => None,
    }
}

/// Zero-pads a finite spectrum to at least `k` terms; `ν_k` is then exactly
/// zero beyond the nonzero count instead of an out-of-range error.
fn padded(spec: &Spectrum, k: usize) -> Result<Spectrum> {
    if k <= spec.len() || spec.declared_tail() > 0.0 {
        return Ok(spec.clone());
    }
    let mut v = spec.values().to_vec();
    v.resize(k, 0.0);
    Spectrum::new(v, 0.0)
}

fn nu(spec: &Spectrum, k: usize) -> Result<LogValue> {
    let s = padded(spec, k)?;
    Ok(esp_table(&s, k)?.nu(k))
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EspArgs {
    /// CSV path, `geometric:<σ>`, `polynomial:<p>` or `explicit:<v1>,<v2>,…`.
    #[arg(long)]
    spectrum: String,
    /// Largest order to tabulate.
    #[arg(long)]
    k: usize,
    /// Truncation length for decay laws.
    #[arg(long, default_value_t = 64)]
    size: usize,
    /// Add a subset-enumeration column (spectra of at most 22 terms).
    #[arg(long, action = ArgAction::Set, num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    brute: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl EspArgs {
    pub fn run(&self) -> Result<Report> {
        if self.k == 0 {
            return Err(Error::invalid("--k must be >= 1"));
        }
        let source = SpectrumSource::parse(&self.spectrum)?;
        let spec = source.load(self.size)?;
        let table = esp_table(&spec, self.k.min(spec.len()))?;
        let sigma = match source {
            SpectrumSource::Geometric(s) => Some(s),
            _ => None,
        };
        let mut csv = String::from("k,log_nu");
        if self.brute {
            csv.push_str(",log_nu_brute");
        }
        if sigma.is_some() {
            csv.push_str(",log_nu_closed");
        }
        csv.push('\n');
        for k in 1..=self.k {
            let dp = if k <= table.k_max() { table.nu(k) } else { LogValue::Zero };
            csv.push_str(&format!("{k},{dp}"));
            if self.brute {
                let b = if k <= spec.len() { esp_brute(&spec, k)? } else { LogValue::Zero };
                csv.push_str(&format!(",{b}"));
            }
            if let Some(s) = sigma {
                csv.push_str(&format!(",{}", nu_geometric(s, k)?));
            }
            csv.push('\n');
        }
        let mut report = Report::new(csv);
        if let SpectrumSource::File(p) = source {
            report.inputs.push(p);
        }
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    alpha: f64,
    /// Same forms as `esp --spectrum`.
    #[arg(long)]
    spectrum: String,
    #[arg(long, default_value_t = 64)]
    size: usize,
    /// Confidence level for the sample threshold.
    #[arg(long)]
    delta: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl BoundArgs {
    pub fn run(&self) -> Result<Report> {
        let source = SpectrumSource::parse(&self.spectrum)?;
        let spec = padded(&source.load(self.size)?, self.k)?;
        let log_bound = dict_tail_bound(self.n, self.k, self.alpha, &spec)?;
        let raw = log_bound.exp();
        let mut csv =
            format!("quantity,value\nlog_bound,{log_bound}\nbound_raw,{raw}\nbound_display,{}\n", raw.min(1.0));
        if let Some(delta) = self.delta {
            let th = sample_threshold(self.k, self.alpha, delta, &spec)?;
            let text = match th {
                Threshold::Finite(t) => t.to_string(),
                Threshold::Unbounded => "inf".to_string(),
            };
            csv.push_str(&format!("threshold,{text}\nthreshold_exceeds_n,{}\n", th.exceeds(self.n as f64)));
        }
        let mut report = Report::new(csv);
        if let SpectrumSource::File(p) = source {
            report.inputs.push(p);
        }
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OksRunArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long)]
    alpha: f64,
    /// Point CSV with a header row, streamed in file order.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sampler (`diag:…`, `gauss:<dim>:<scale>`) used when no input is given.
    #[arg(long, conflicts_with = "input")]
    sampler: Option<String>,
    /// Stream length; required with a sampler, truncates an input file.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record a trace row every this many points (0: only at the end).
    #[arg(long, default_value_t = 100)]
    trace_every: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl OksRunArgs {
    pub fn run(&self) -> Result<Report> {
        let k = kernel(&self.kernel)?;
        let mut inputs = Vec::new();
        let points = match (&self.input, &self.sampler) {
            (Some(path), _) => {
                inputs.push(path.clone());
                let mut pts = read_table(path)?.points;
                if let Some(n) = self.n {
                    if n > pts.len() {
                        return Err(Error::invalid(format!(
                            "{} has {} rows, --n {n} requested",
                            path.display(),
                            pts.len()
                        )));
                    }
                    pts.truncate(n);
                }
                pts
            }
            (None, Some(text)) => {
                let seed = self.seed.ok_or_else(|| Error::invalid("--seed is required with --sampler"))?;
                let n = self.n.ok_or_else(|| Error::invalid("--n is required with --sampler"))?;
                inputs.extend(sampler_inputs(text));
                Sampler::parse(text, seed)?.stream(n)?
            }
            (None, None) => return Err(Error::invalid("give --input or --sampler")),
        };
        let (dict, trace) = run_stream(&k, self.alpha, &points, self.trace_every)?;
        let mut report = Report::new(trace.to_csv());
        report.seed = self.seed.filter(|_| self.input.is_none());
        report.inputs = inputs;
        report.results.insert("dict_size".into(), dict.len().to_string());
        report.results.insert("log_det".into(), dict.log_det().to_string());
        report.dictionary = Some(dict);
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct McGramArgs {
    #[arg(long, default_value = "linear")]
    kernel: String,
    /// `diag:<λ1>,<λ2>,…`, `gauss:<dim>:<scale>` or `dataset:<path>`.
    #[arg(long)]
    sampler: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl McGramArgs {
    pub fn run(&self) -> Result<Report> {
        let k = kernel(&self.kernel)?;
        let sampler = Sampler::parse(&self.sampler, self.seed)?;
        let est = mc_expected_gram_det(&sampler, &k, self.k, self.trials, Exec::from_env())?;
        let reference = exact_spectrum(&sampler, &k).map(|s| nu(s, self.k)).transpose()?.map(LogValue::exp);
        let within = reference.map(|r| est.within(r, Z));
        let mut report = Report::new(format!(
            "k,trials,mean,std_error,reference,within_3se\n{},{},{},{},{},{}\n",
            self.k,
            est.trials,
            est.mean,
            est.std_error,
            opt(reference),
            opt(within)
        ));
        report.seed = Some(self.seed);
        report.inputs = sampler_inputs(&self.sampler);
        report.passed = within.unwrap_or(true);
        Ok(report)
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct McMomentArgs {
    #[arg(long, default_value = "linear")]
    kernel: String,
    #[arg(long)]
    sampler: String,
    #[arg(long)]
    k: usize,
    /// Moment order, 2 or 3.
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Sample size behind the empirical power-kernel spectrum.
    #[arg(long, default_value_t = 2000)]
    spectrum_n: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl McMomentArgs {
    pub fn run(&self) -> Result<Report> {
        let k = kernel(&self.kernel)?;
        let sampler = Sampler::parse(&self.sampler, self.seed)?;
        if self.spectrum_n < self.k {
            return Err(Error::invalid("--spectrum-n must be at least --k"));
        }
        let est = mc_det_moment(&sampler, &k, self.k, self.m, self.trials, Exec::from_env())?;
        let power = KernelSpec::power(k.clone(), self.m)?;
        let spec = empirical_spectrum(&gram(&power, &sampler.aux(self.spectrum_n))?, DEFAULT_CLAMP_TOL)?;
        let log_bound = moment_bound(&spec, self.k)?;
        let bound = log_bound.exp();
        let holds = est.mean + Z * est.std_error <= bound * (1.0 + EXACT_SLACK);
        let reference = match exact_spectrum(&sampler, &k) {
            Some(s) if self.k == 1 => Some(gaussian_quadratic_moment(s.values(), self.m)?),
            _ => None,
        };
        let within = reference.map(|r| est.within(r, Z));
        let mut report = Report::new(format!(
            "k,m,trials,mean,std_error,log_moment_bound,moment_bound,bound_holds,reference,within_3se\n\
             {},{},{},{},{},{},{},{},{},{}\n",
            self.k,
            self.m,
            est.trials,
            est.mean,
            est.std_error,
            log_bound,
            bound,
            holds,
            opt(reference),
            opt(within)
        ));
        report.seed = Some(self.seed);
        report.inputs = sampler_inputs(&self.sampler);
        // with an exact reference the sampled bound is only an estimate of it
        report.passed = within.unwrap_or(holds);
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct KstarTailArgs {
    #[arg(long, default_value = "linear")]
    kernel: String,
    #[arg(long)]
    sampler: String,
    #[arg(long)]
    alpha: f64,
    /// Points per trial, at most 10.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Sample size behind the empirical spectrum when no exact one is known.
    #[arg(long, default_value_t = 2000)]
    spectrum_n: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl KstarTailArgs {
    pub fn run(&self) -> Result<Report> {
        let k = kernel(&self.kernel)?;
        let sampler = Sampler::parse(&self.sampler, self.seed)?;
        let est = mc_kstar_tail(&sampler, &k, self.alpha, self.n, self.k, self.trials, Exec::from_env())?;
        let (spec, source) = match exact_spectrum(&sampler, &k) {
            Some(s) => (padded(s, self.k)?, "exact"),
            None => {
                let g = gram(&k, &sampler.aux(self.spectrum_n.max(self.k)))?;
                (empirical_spectrum(&g, DEFAULT_CLAMP_TOL)?, "empirical")
            }
        };
        let log_bound = dict_tail_bound(self.n, self.k, self.alpha, &spec)?;
        let bound = log_bound.exp();
        let holds = est.mean <= bound + Z * est.std_error;
        let mut report = Report::new(format!(
            "n,k,alpha,trials,mean,std_error,spectrum,log_bound,bound,holds\n{},{},{},{},{},{},{},{},{},{}\n",
            self.n, self.k, self.alpha, est.trials, est.mean, est.std_error, source, log_bound, bound, holds
        ));
        report.seed = Some(self.seed);
        report.inputs = sampler_inputs(&self.sampler);
        report.passed = holds;
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GrowthArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "gauss:1:1")]
    sampler: String,
    /// Comma-separated sample counts to record; default doubles from 125.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl GrowthArgs {
    pub fn run(&self) -> Result<Report> {
        let k = kernel(&self.kernel)?;
        let sampler = Sampler::parse(&self.sampler, self.seed)?;
        let checkpoints = if self.checkpoints.is_empty() {
            std::iter::successors(Some(125usize), |c| Some(c * 2)).take_while(|&c| c < self.n).collect()
        } else {
            self.checkpoints.clone()
        };
        let trace = growth_experiment(&sampler, &k, self.alpha, self.n, &checkpoints)?;
        let mut report = Report::new(trace.to_csv());
        report.seed = Some(self.seed);
        report.inputs = sampler_inputs(&self.sampler);
        if let Some(last) = trace.records.last() {
            report.results.insert("dict_size".into(), last.dict_size.to_string());
        }
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct NystromArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value = "gauss:1:1")]
    sampler: String,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl NystromArgs {
    pub fn run(&self) -> Result<Report> {
        let k = kernel(&self.kernel)?;
        let sampler = Sampler::parse(&self.sampler, self.seed)?;
        let rec = nystrom_compare(&sampler, &k, self.alpha, self.n)?;
        let mut report = Report::new(format!("{}\n{}\n", NystromRecord::CSV_HEADER, rec.csv_row()));
        report.seed = Some(self.seed);
        report.inputs = sampler_inputs(&self.sampler);
        report.passed = rec.bound_holds();
        report.results.insert("entrywise_bound_holds".into(), rec.bound_holds().to_string());
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RegressArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,
    /// Training CSV whose last column is `y`; synthetic data otherwise.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Test CSV in the same layout as the training file.
    #[arg(long, requires = "train")]
    test: Option<PathBuf>,
    /// Synthetic training size; ignored with `--train`.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Synthetic test size; ignored with `--train`.
    #[arg(long, default_value_t = 2000)]
    n_test: usize,
    /// Synthetic label noise standard deviation; ignored with `--train`.
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    /// Required for synthetic data.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl RegressArgs {
    pub fn run(&self) -> Result<Report> {
        let k = kernel(&self.kernel)?;
        let Some(train_path) = &self.train else {
            let seed = self.seed.ok_or_else(|| Error::invalid("--seed is required for synthetic data"))?;
            let rec = regression_experiment(&k, self.alpha, self.ridge, self.n, self.n_test, self.noise, seed)?;
            let mut report = Report::new(format!("{}\n{}\n", RegressionRecord::CSV_HEADER, rec.csv_row()));
            report.seed = Some(seed);
            return Ok(report);
        };
        let labeled = |path: &PathBuf| -> Result<_> {
            let t = read_table(path)?;
            let y = t.targets.ok_or_else(|| Error::invalid(format!("{} has no 'y' column", path.display())))?;
            Ok((t.points, y))
        };
        let (xs, ys) = labeled(train_path)?;
        let (dict, _) = run_stream(&k, self.alpha, &xs, 0)?;
        let model = fit(&dict, &xs, &ys, self.ridge)?;
        let train_mse = evaluate(&model, &xs, &ys)?;
        let mut inputs = vec![train_path.clone()];
        let (n_test, test_mse) = match &self.test {
            Some(p) => {
                inputs.push(p.clone());
                let (tx, ty) = labeled(p)?;
                (tx.len(), evaluate(&model, &tx, &ty)?.to_string())
            }
            None => (0, String::new()),
        };
        let mut report = Report::new(format!(
            "{}\n{},{},{},{},{}\n",
            RegressionRecord::CSV_HEADER,
            xs.len(),
            n_test,
            dict.len(),
            train_mse,
            test_mse
        ));
        report.inputs = inputs;
        Ok(report)
    }
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SpectrumEstArgs {
    #[arg(long)]
    kernel: String,
    #[arg(long)]
    sampler: String,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Estimate the spectrum of the m-th power of the kernel.
    #[arg(long, default_value_t = 1)]
    power: u32,
    #[arg(long, default_value_t = DEFAULT_CLAMP_TOL)]
    clamp_tol: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

impl SpectrumEstArgs {
    pub fn run(&self) -> Result<Report> {
        let base = kernel(&self.kernel)?;
        let k = if self.power == 1 { base.clone() } else { KernelSpec::power(base.clone(), self.power)? };
        let sampler = Sampler::parse(&self.sampler, self.seed)?;
        let spec = empirical_spectrum(&gram(&k, &sampler.stream(self.n)?)?, self.clamp_tol)?;
        let mut report = Report::new(spectrum_to_csv(&spec));
        report.seed = Some(self.seed);
        report.inputs = sampler_inputs(&self.sampler);
        if let (Some(exact), 1) = (exact_spectrum(&sampler, &base), self.power) {
            report.results.insert("l1_gap_to_exact".into(), spectrum_l1_gap(&spec, exact).to_string());
        }
        Ok(report)
    }
}
