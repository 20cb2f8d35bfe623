//! Python bindings: genomes, sessions, sweeps, structural metrics and
//! corpus statistics. Structured results come back as plain dicts and lists.

use breeder_core::metrics::{
    analyze, genome_to_graph, grc_hierarchy, modularity_q, null_anchor, optimal_partition,
    DirectedGraph, NullModelConfig, Partition,
};
use breeder_core::neat::{self, InnovationRegistry, MutationConfig};
use breeder_core::probe::{sweep as run_sweep, SweepSpec};
use breeder_core::stats::{self, ReportConfig, Statistic};
use breeder_core::store::Store as CoreStore;
use breeder_core::{Genome as CoreGenome, Innovation, Palette};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use pythonize::{depythonize, pythonize};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

create_exception!(breeder, BreederError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    BreederError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    Ok(pythonize(py, value)?)
}

fn palette(name: &str) -> PyResult<Palette> {
    name.parse().map_err(err)
}

fn mutation_config(cfg: Option<&Bound<'_, PyAny>>) -> PyResult<MutationConfig> {
    let cfg = match cfg {
        Some(c) => depythonize(c)?,
        None => MutationConfig::default(),
    };
    cfg.check().map_err(err)?;
    Ok(cfg)
}

/// A CPPN genome.
#[pyclass(module = "breeder", from_py_object)]
#[derive(Clone)]
pub struct Genome {
    inner: CoreGenome,
}

#[pymethods]
impl Genome {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = CoreGenome::from_json(text).map_err(err)?;
        Ok(Self { inner })
    }

    /// Canonical JSON text.
    fn to_json(&self) -> String {
        self.inner.to_canonical_json()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    #[getter]
    fn id(&self) -> &str {
        &self.inner.id
    }

    #[getter]
    fn parent_id(&self) -> Option<&str> {
        self.inner.parent_id.as_deref()
    }

    #[getter]
    fn palette(&self) -> &'static str {
        match self.inner.palette {
            Palette::Gray => "gray",
            Palette::Color => "color",
        }
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.nodes.len()
    }

    #[getter]
    fn connection_count(&self) -> usize {
        self.inner.connections.len()
    }

    /// Innovation ids of enabled connections.
    fn enabled_connections(&self) -> Vec<u64> {
        self.inner
            .connections
            .iter()
            .filter(|c| c.enabled)
            .map(|c| c.innovation.0)
            .collect()
    }

    /// Broken invariants, empty for a valid genome.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    fn evaluate<'py>(&self, py: Python<'py>, x: f64, y: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &breeder_core::evaluate(&self.inner, x, y).map_err(err)?)
    }

    /// Raw pixel bytes, row-major, 1 or 3 channels.
    #[pyo3(signature = (width, height=None))]
    fn render<'py>(
        &self,
        py: Python<'py>,
        width: usize,
        height: Option<usize>,
    ) -> PyResult<Bound<'py, PyBytes>> {
        let h = height.unwrap_or(width);
        let img = py
            .detach(|| breeder_core::render(&self.inner, width, h))
            .map_err(err)?;
        Ok(PyBytes::new(py, &img.data))
    }

    #[pyo3(signature = (size, node=None))]
    fn render_png<'py>(
        &self,
        py: Python<'py>,
        size: usize,
        node: Option<u64>,
    ) -> PyResult<Bound<'py, PyBytes>> {
        let img = py
            .detach(|| match node {
                Some(n) => breeder_core::render_node(&self.inner, Innovation(n), size, size),
                None => breeder_core::render(&self.inner, size, size),
            })
            .map_err(err)?;
        Ok(PyBytes::new(py, &img.to_png()))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Genome(id={:?}, nodes={}, connections={})",
            self.inner.id,
            self.inner.nodes.len(),
            self.inner.connections.len()
        )
    }
}

impl From<CoreGenome> for Genome {
    fn from(inner: CoreGenome) -> Self {
        Self { inner }
    }
}

/// Historical-marking registry shared by genomes that will be crossed.
#[pyclass(module = "breeder")]
#[derive(Default)]
pub struct Registry {
    inner: InnovationRegistry,
}

#[pymethods]
impl Registry {
    #[new]
    fn new() -> Self {
        Self::default()
    }

    fn observe(&mut self, genome: &Genome) {
        self.inner.observe(&genome.inner);
    }

    #[getter]
    fn next_id(&self) -> u64 {
        self.inner.next_id()
    }
}

#[pyfunction]
#[pyo3(signature = (palette_name, registry, seed))]
fn seed_genome(palette_name: &str, registry: &mut Registry, seed: u64) -> PyResult<Genome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(neat::seed_genome(palette(palette_name)?, &mut registry.inner, &mut rng).into())
}

#[pyfunction]
#[pyo3(signature = (genome, registry, seed, config=None))]
fn mutate(
    genome: &Genome,
    registry: &mut Registry,
    seed: u64,
    config: Option<&Bound<'_, PyAny>>,
) -> PyResult<Genome> {
    let cfg = mutation_config(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(neat::mutate(&genome.inner, &cfg, &mut registry.inner, &mut rng).into())
}

#[pyfunction]
fn crossover(a: &Genome, b: &Genome, seed: u64) -> PyResult<Genome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(neat::crossover(&a.inner, &b.inner, &mut rng)
        .map_err(err)?
        .into())
}

/// An interactive breeding session with its own registry and rng.
#[pyclass(module = "breeder")]
pub struct Session {
    session: neat::Session,
    registry: InnovationRegistry,
    rng: ChaCha8Rng,
    config: MutationConfig,
}

#[pymethods]
impl Session {
    #[staticmethod]
    #[pyo3(signature = (palette_name="gray", size=neat::DEFAULT_POPULATION, seed=0))]
    fn scratch(palette_name: &str, size: usize, seed: u64) -> PyResult<Self> {
        let mut registry = InnovationRegistry::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let session = neat::Session::scratch(
            "py",
            palette(palette_name)?,
            size,
            seed,
            &mut registry,
            &mut rng,
        )
        .map_err(err)?;
        Ok(Self {
            session,
            registry,
            rng,
            config: MutationConfig::default(),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (parent, size=neat::DEFAULT_POPULATION, seed=0, config=None))]
    fn branch(
        parent: &Genome,
        size: usize,
        seed: u64,
        config: Option<&Bound<'_, PyAny>>,
    ) -> PyResult<Self> {
        let config = mutation_config(config)?;
        let mut registry = InnovationRegistry::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let session = neat::Session::branched(
            "py",
            &parent.inner,
            size,
            seed,
            &config,
            &mut registry,
            &mut rng,
        )
        .map_err(err)?;
        Ok(Self {
            session,
            registry,
            rng,
            config,
        })
    }

    #[getter]
    fn generation(&self) -> u64 {
        self.session.generation
    }

    #[getter]
    fn population(&self) -> Vec<Genome> {
        self.session
            .population
            .iter()
            .cloned()
            .map(Genome::from)
            .collect()
    }

    /// Keeps the selected slots and refills the rest with offspring.
    fn step(&mut self, selected: Vec<usize>) -> PyResult<u64> {
        self.session = neat::next_generation(
            &self.session,
            &selected,
            &self.config,
            &mut self.registry,
            &mut self.rng,
        )
        .map_err(err)?;
        Ok(self.session.generation)
    }

    fn __len__(&self) -> usize {
        self.session.size()
    }
}

/// Weight sweep of one connection: frame weights, PNG frames and the impact
/// summary.
#[pyfunction]
#[pyo3(signature = (genome, connection, size=64, fine=false, lo=None, hi=None, step=None))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    genome: &Genome,
    connection: u64,
    size: usize,
    fine: bool,
    lo: Option<f64>,
    hi: Option<f64>,
    step: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut spec = SweepSpec::new(Innovation(connection), size, size);
    if fine {
        spec = spec.fine();
    }
    spec.lo = lo.unwrap_or(spec.lo);
    spec.hi = hi.unwrap_or(spec.hi);
    spec.step = step.unwrap_or(spec.step);
    let result = py
        .detach(|| run_sweep(&genome.inner, &spec, Default::default()))
        .map_err(err)?;
    let out = pyo3::types::PyDict::new(py);
    out.set_item("baseline_weight", result.baseline_weight)?;
    out.set_item(
        "weights",
        result.frames.iter().map(|f| f.weight).collect::<Vec<_>>(),
    )?;
    let frames: Vec<Bound<'py, PyBytes>> = result
        .frames
        .iter()
        .map(|f| PyBytes::new(py, &f.image.to_png()))
        .collect();
    out.set_item("frames", frames)?;
    out.set_item("baseline", PyBytes::new(py, &result.baseline.to_png()))?;
    out.set_item("impact", to_py(py, &result.impact.summary())?)?;
    Ok(out.into_any())
}

fn graph(n: usize, edges: Vec<(usize, usize)>) -> PyResult<DirectedGraph> {
    DirectedGraph::new(n, edges).map_err(err)
}

/// Directed modularity of `labels` on the graph.
#[pyfunction]
fn modularity(n: usize, edges: Vec<(usize, usize)>, labels: Vec<usize>) -> PyResult<f64> {
    modularity_q(&graph(n, edges)?, &Partition::new(&labels)).map_err(err)
}

/// Best split found and its Q, as `(labels, q)`.
#[pyfunction]
fn best_partition(n: usize, edges: Vec<(usize, usize)>) -> PyResult<(Vec<usize>, f64)> {
    let (p, q) = optimal_partition(&graph(n, edges)?).map_err(err)?;
    Ok((p.assignment().to_vec(), q))
}

#[pyfunction]
fn hierarchy(n: usize, edges: Vec<(usize, usize)>) -> PyResult<f64> {
    grc_hierarchy(&graph(n, edges)?).map_err(err)
}

/// Node innovations (in graph index order) and edges of the enabled-connection graph.
#[pyfunction]
fn genome_graph(genome: &Genome) -> (Vec<u64>, Vec<(usize, usize)>) {
    let gg = genome_to_graph(&genome.inner);
    (
        gg.nodes.iter().map(|n| n.0).collect(),
        gg.graph.edges().to_vec(),
    )
}

/// Q and H residuals against null models grown from `parent` (or the
/// palette's seed topology).
#[pyfunction]
#[pyo3(signature = (genome, parent=None, nulls=10, seed=0, count_disabled=false))]
fn metrics<'py>(
    py: Python<'py>,
    genome: &Genome,
    parent: Option<&Genome>,
    nulls: usize,
    seed: u64,
    count_disabled: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = NullModelConfig {
        count: nulls,
        count_disabled,
    };
    let source = &genome.inner;
    let parent = parent.map(|p| &p.inner);
    let m = py
        .detach(|| {
            let mut registry = InnovationRegistry::new();
            registry.observe(source);
            if let Some(p) = parent {
                registry.observe(p);
            }
            let anchor = null_anchor(source, parent, &mut registry);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            analyze(source, &anchor, &cfg, &mut registry, &mut rng)
        })
        .map_err(err)?;
    to_py(py, &m)
}

#[pyfunction]
fn wilcoxon<'py>(py: Python<'py>, values: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &stats::wilcoxon_signed_rank(&values).map_err(err)?)
}

#[pyfunction]
fn pearson<'py>(py: Python<'py>, x: Vec<f64>, y: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &stats::pearson(&x, &y).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (values, statistic="median", resamples=stats::DEFAULT_RESAMPLES, level=stats::DEFAULT_LEVEL, seed=0))]
fn bootstrap_ci<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    statistic: &str,
    resamples: usize,
    level: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let stat = match statistic {
        "mean" => Statistic::Mean,
        "median" => Statistic::Median,
        other => return Err(err(format!("unknown statistic {other:?}"))),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ci = py
        .detach(|| stats::bootstrap_ci(&values, stat, resamples, level, &mut rng))
        .map_err(err)?;
    to_py(py, &ci)
}

/// Scores every genome and summarises residuals against descendant fitness.
#[pyfunction]
#[pyo3(signature = (genomes, nulls=10, seed=0, resamples=stats::DEFAULT_RESAMPLES, bins=stats::DEFAULT_BINS))]
fn corpus_report<'py>(
    py: Python<'py>,
    genomes: Vec<Genome>,
    nulls: usize,
    seed: u64,
    resamples: usize,
    bins: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let genomes: Vec<CoreGenome> = genomes.into_iter().map(|g| g.inner).collect();
    let cfg = NullModelConfig {
        count: nulls,
        count_disabled: false,
    };
    let report_cfg = ReportConfig {
        bins,
        resamples,
        ..ReportConfig::default()
    };
    let report = py
        .detach(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let corpus = stats::score_corpus(&genomes, &cfg, &mut rng);
            stats::corpus_report(&corpus, &report_cfg, &mut rng)
        })
        .map_err(err)?;
    to_py(py, &report)
}

/// Read-only view of a published-image store directory.
#[pyclass(module = "breeder")]
pub struct Store {
    inner: CoreStore,
}

#[pymethods]
impl Store {
    #[staticmethod]
    fn open(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: CoreStore::open(path).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn ids(&self) -> Vec<String> {
        self.inner
            .records()
            .iter()
            .map(|r| r.genome_id.clone())
            .collect()
    }

    fn genome(&self, id: &str) -> PyResult<Genome> {
        self.inner
            .get(id)
            .map(|r| r.genome.clone().into())
            .ok_or_else(|| err(format!("unknown image {id}")))
    }

    fn record<'py>(&self, py: Python<'py>, id: &str) -> PyResult<Bound<'py, PyAny>> {
        let r = self
            .inner
            .get(id)
            .ok_or_else(|| err(format!("unknown image {id}")))?;
        to_py(py, r)
    }

    fn children(&self, id: &str) -> Vec<String> {
        self.inner
            .children(id)
            .iter()
            .map(|r| r.genome_id.clone())
            .collect()
    }

    fn lineage<'py>(&self, py: Python<'py>, id: &str) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.lineage(id).map_err(err)?)
    }
}

#[pymodule]
fn breeder(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BreederError", m.py().get_type::<BreederError>())?;
    m.add_class::<Genome>()?;
    m.add_class::<Registry>()?;
    m.add_class::<Session>()?;
    m.add_class::<Store>()?;
    m.add_function(wrap_pyfunction!(seed_genome, m)?)?;
    m.add_function(wrap_pyfunction!(mutate, m)?)?;
    m.add_function(wrap_pyfunction!(crossover, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(modularity, m)?)?;
    m.add_function(wrap_pyfunction!(best_partition, m)?)?;
    m.add_function(wrap_pyfunction!(hierarchy, m)?)?;
    m.add_function(wrap_pyfunction!(genome_graph, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap_ci, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_report, m)?)?;
    Ok(())
}
