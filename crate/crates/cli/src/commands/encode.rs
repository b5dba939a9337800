use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use floorgrid::encoding::{
    embed as max_pool, geometric_features, group_rooms, normalize_features, shared_transform,
    triplet_accuracy, Embedding, Layer, RegionFeatures, GEOMETRIC_FEATURE_NAMES,
};
use floorgrid::io::csv::{features_from_csv, features_to_csv};
use floorgrid::labeling::{default_class_names, vote_labels, RegionLabels};
use floorgrid::pipeline::PlanAnalysis;
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::{files, svg, InputError};

#[derive(Debug, clap::Args)]
pub struct EmbedArgs {
    /// Plan JSON files or region-feature CSV files.
    pub inputs: Vec<PathBuf>,
    /// JSON list of layers `{"weight": [[..]], "bias": [..]}` applied to every region.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// JSON list of `[anchor, positive, negative]` paths, relative to the file.
    #[arg(long)]
    pub triplets: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct GroupArgs {
    /// Plan JSON or region-feature CSV.
    pub input: PathBuf,
    /// Distance below which regions join; widest-gap rule when omitted.
    #[arg(long)]
    pub threshold: Option<f64>,
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn read_features(path: &Path) -> Result<RegionFeatures> {
    let text = files::read_input(path)?;
    features_from_csv(&text).map_err(|e| InputError(format!("{}: {e}", path.display())).into())
}

/// Region features of one input: a CSV is taken as is, a plan goes through
/// the first strategy's partition.
fn features_of(cfg: &PipelineConfig, path: &Path) -> Result<RegionFeatures> {
    if is_csv(path) {
        return read_features(path);
    }
    let plan = files::load_plan(path)?;
    let analysis = PlanAnalysis::new(&plan, &cfg.raster_options())
        .with_context(|| format!("density stage for {}", path.display()))?;
    let partition = analysis.partition(&cfg.strategies()?[0]);
    Ok(geometric_features(&partition, &analysis.density, None))
}

fn load_layers(path: &Path) -> Result<Vec<Layer>> {
    let text = files::read_input(path)?;
    serde_json::from_str(&text).with_context(|| format!("weights {}", path.display()))
}

struct Embedder<'a> {
    cfg: &'a PipelineConfig,
    layers: Vec<Layer>,
    cache: BTreeMap<PathBuf, Embedding>,
}

impl Embedder<'_> {
    fn embed(&mut self, path: &Path) -> Result<Embedding> {
        if let Some(e) = self.cache.get(path) {
            return Ok(e.clone());
        }
        let mut f = features_of(self.cfg, path)?;
        if !self.layers.is_empty() {
            f = shared_transform(&f, &self.layers)
                .map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        }
        let e = max_pool(&f).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        self.cache.insert(path.to_path_buf(), e.clone());
        Ok(e)
    }
}

#[derive(Serialize)]
struct TripletResult {
    triplets: usize,
    accuracy: f64,
}

pub fn embed(cfg: &PipelineConfig, args: &EmbedArgs) -> Result<()> {
    ensure!(
        !args.inputs.is_empty() || args.triplets.is_some(),
        InputError("nothing to embed".into())
    );
    let layers = match &args.weights {
        Some(p) => load_layers(p)?,
        None => Vec::new(),
    };
    let mut embedder = Embedder {
        cfg,
        layers,
        cache: BTreeMap::new(),
    };
    files::create_dir(&cfg.out)?;

    if !args.inputs.is_empty() {
        let rows: Vec<Vec<f64>> = args
            .inputs
            .iter()
            .map(|p| embedder.embed(p).map(|e| e.0))
            .collect::<Result<_>>()?;
        let table = RegionFeatures::from_rows(&rows)
            .map_err(|_| InputError("inputs have different widths".into()))?;
        let header: Vec<String> =
            if embedder.layers.is_empty() && !args.inputs.iter().any(|p| is_csv(p)) {
                GEOMETRIC_FEATURE_NAMES
                    .iter()
                    .map(|s| s.to_string())
                    .collect()
            } else {
                (0..table.cols).map(|i| format!("e{i}")).collect()
            };
        files::write_text(
            &cfg.out.join("embeddings.csv"),
            &features_to_csv(&table, Some(&header)),
        )?;
        let names: Vec<String> = args.inputs.iter().map(|p| files::display_name(p)).collect();
        files::write_json(&cfg.out.join("embeddings.json"), &names)?;
        println!(
            "embedded {} inputs into {} dimensions",
            table.rows, table.cols
        );
    }

    if let Some(path) = &args.triplets {
        let text = files::read_input(path)?;
        let triplets: Vec<[PathBuf; 3]> =
            serde_json::from_str(&text).with_context(|| format!("triplets {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let (mut a, mut p, mut n) = (Vec::new(), Vec::new(), Vec::new());
        for [anchor, pos, neg] in &triplets {
            a.push(embedder.embed(&base.join(anchor))?);
            p.push(embedder.embed(&base.join(pos))?);
            n.push(embedder.embed(&base.join(neg))?);
        }
        let accuracy = triplet_accuracy(&a, &p, &n)?;
        files::write_json(
            &cfg.out.join("triplets.json"),
            &TripletResult {
                triplets: triplets.len(),
                accuracy,
            },
        )?;
        println!(
            "triplet accuracy: {accuracy:.2}% over {} triplets",
            triplets.len()
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct GroupFile {
    input: String,
    threshold: f64,
    region_count: usize,
    instance_count: usize,
    instance_of: Vec<usize>,
    room_labels: Vec<i32>,
    room_names: Vec<String>,
}

pub fn group(cfg: &PipelineConfig, args: &GroupArgs) -> Result<()> {
    if let Some(t) = args.threshold {
        ensure!(
            t >= 0.0,
            InputError(format!("threshold must be non-negative, got {t}"))
        );
    }
    let classes = default_class_names();
    files::create_dir(&cfg.out)?;
    let name = files::display_name(&args.input);

    let (features, labels, figure) = if is_csv(&args.input) {
        let f = read_features(&args.input)?;
        let labels = RegionLabels(vec![-1; f.rows]);
        (f, labels, None)
    } else {
        let plan = files::load_plan(&args.input)?;
        let analysis = PlanAnalysis::new(&plan, &cfg.raster_options())
            .with_context(|| format!("density stage for {}", args.input.display()))?;
        let partition = analysis.partition(&cfg.strategies()?[0]);
        let labels = match plan.gt_rooms {
            Some(_) => vote_labels(&partition, &analysis.gt_labels(&plan, &classes))?.0,
            None => RegionLabels(vec![-1; partition.len()]),
        };
        let f = normalize_features(&geometric_features(&partition, &analysis.density, None));
        (f, labels, Some((plan, analysis, partition)))
    };
    ensure!(
        features.rows > 0,
        InputError(format!("{name} has no regions"))
    );

    let grouping = group_rooms(&features, &labels, args.threshold)?;
    let instance_count = grouping.room_labels.len();
    let room_names = grouping
        .room_labels
        .iter()
        .map(|&l| {
            usize::try_from(l)
                .ok()
                .and_then(|l| classes.get(l).cloned())
                .unwrap_or_else(|| "unlabeled".into())
        })
        .collect();
    if let Some((plan, analysis, partition)) = &figure {
        let instance_grid = partition.region_id_grid.map(|&id| {
            if id < 0 {
                -1
            } else {
                grouping.instance_of[id as usize] as i32
            }
        });
        files::write_grid(&cfg.out.join("instances.fgrd"), &instance_grid)?;
        let svg = svg::instances(
            plan,
            &analysis.raster.transform,
            partition,
            &grouping.instance_of,
            &grouping.room_labels,
            &classes,
        );
        files::write_text(&cfg.out.join("instances.svg"), &svg)?;
    }
    files::write_json(
        &cfg.out.join("instances.json"),
        &GroupFile {
            input: name.clone(),
            threshold: grouping.threshold,
            region_count: features.rows,
            instance_count,
            instance_of: grouping.instance_of,
            room_labels: grouping.room_labels,
            room_names,
        },
    )?;
    println!(
        "{name}: {} regions in {instance_count} instances",
        features.rows
    );
    Ok(())
}
