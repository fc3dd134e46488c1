//! Synthetic labeled datasets and the shard index used by training.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::RecordAllocation;
use crate::error::AllocationError;
use crate::seed;

/// Shape of the synthetic classification data: Gaussian class clusters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub dimension: usize,
    pub classes: usize,
    /// Scale of the class-center spread relative to unit point noise.
    pub cluster_separation: f64,
    /// Per-user label restriction for the non-iid setting (at most this many
    /// distinct labels per user).
    #[serde(default)]
    pub max_labels_per_user: Option<usize>,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), AllocationError> {
        if self.dimension == 0 {
            return Err(AllocationError::BadDimension);
        }
        if self.classes < 2 {
            return Err(AllocationError::BadClassCount(self.classes));
        }
        Ok(())
    }
}

/// Flat row-major feature matrix plus labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    features: Vec<f64>,
    labels: Vec<u32>,
    dim: usize,
}

impl DataSet {
    pub fn new(features: Vec<f64>, labels: Vec<u32>, dim: usize) -> Self {
        assert_eq!(features.len(), labels.len() * dim);
        Self {
            features,
            labels,
            dim,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }
}

/// Gaussian-mixture generator with centers fixed by a seed, so train and
/// held-out records come from the same population.
#[derive(Debug, Clone)]
pub struct GaussianMixture {
    centers: Vec<Vec<f64>>,
    dim: usize,
}

impl GaussianMixture {
    pub fn new(spec: &SyntheticSpec, seed: u64) -> Result<Self, AllocationError> {
        spec.validate()?;
        let mut rng = seed::named_rng(seed, "mixture-centers", &[]);
        let centers = (0..spec.classes)
            .map(|_| {
                (0..spec.dimension)
                    .map(|_| spec.cluster_separation * gauss(&mut rng))
                    .collect()
            })
            .collect();
        Ok(Self {
            centers,
            dim: spec.dimension,
        })
    }

    pub fn classes(&self) -> usize {
        self.centers.len()
    }

    /// Labels for allocated records: uniform over classes, or restricted to a
    /// small per-user label set in the non-iid setting.
    pub fn labels_for_allocation(
        &self,
        alloc: &RecordAllocation,
        max_labels_per_user: Option<usize>,
        seed: u64,
    ) -> Vec<u32> {
        let mut rng = seed::named_rng(seed, "labels", &[]);
        match max_labels_per_user {
            None => (0..alloc.len())
                .map(|_| rng.gen_range(0..self.classes() as u32))
                .collect(),
            Some(cap) => {
                let cap = cap.max(1).min(self.classes());
                let allowed: Vec<Vec<u32>> = (0..alloc.num_users())
                    .map(|_| {
                        let mut all: Vec<u32> = (0..self.classes() as u32).collect();
                        all.shuffle(&mut rng);
                        all.truncate(cap);
                        all
                    })
                    .collect();
                (0..alloc.len())
                    .map(|r| {
                        let set = &allowed[alloc.user_of(r) as usize];
                        set[rng.gen_range(0..set.len())]
                    })
                    .collect()
            }
        }
    }

    /// Samples one point per label.
    pub fn sample(&self, labels: &[u32], seed: u64) -> DataSet {
        let mut rng = seed::named_rng(seed, "mixture-sample", &[]);
        let mut features = Vec::with_capacity(labels.len() * self.dim);
        for &l in labels {
            let center = &self.centers[l as usize];
            for c in center {
                features.push(c + gauss(&mut rng));
            }
        }
        DataSet::new(features, labels.to_vec(), self.dim)
    }

    /// Held-out set with exact class proportions (stratified), shuffled.
    pub fn sample_stratified(&self, count: usize, seed: u64) -> DataSet {
        let classes = self.classes();
        let base = count / classes;
        let extra = count % classes;
        let mut labels = Vec::with_capacity(count);
        for c in 0..classes {
            let n = base + usize::from(c < extra);
            labels.extend(std::iter::repeat_n(c as u32, n));
        }
        let mut rng = seed::named_rng(seed, "strata-shuffle", &[]);
        labels.shuffle(&mut rng);
        self.sample(&labels, seed)
    }
}

fn gauss(rng: &mut ChaCha20Rng) -> f64 {
    // Box-Muller; one value per call keeps the stream usage obvious
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Record indices grouped per (silo, user) pair.
#[derive(Debug, Clone)]
pub struct ShardIndex {
    shards: Vec<Vec<Vec<u32>>>,
    num_silos: u32,
    num_users: u32,
}

impl ShardIndex {
    pub fn records(&self, silo: u32, user: u32) -> &[u32] {
        &self.shards[silo as usize][user as usize]
    }

    /// All record indices held by one silo, in record order.
    pub fn silo_records(&self, silo: u32) -> Vec<u32> {
        let mut all: Vec<u32> = self.shards[silo as usize]
            .iter()
            .flatten()
            .copied()
            .collect();
        all.sort_unstable();
        all
    }

    pub fn num_silos(&self) -> u32 {
        self.num_silos
    }

    pub fn num_users(&self) -> u32 {
        self.num_users
    }
}

pub fn shard_index(alloc: &RecordAllocation) -> ShardIndex {
    let mut shards =
        vec![vec![Vec::new(); alloc.num_users() as usize]; alloc.num_silos() as usize];
    for (r, u, s) in alloc.iter() {
        shards[s as usize][u as usize].push(r as u32);
    }
    ShardIndex {
        shards,
        num_silos: alloc.num_silos(),
        num_users: alloc.num_users(),
    }
}

/// Writes the allocation exchange CSV: `record_id,user_id,silo_id`, with
/// feature columns and the label appended last when a dataset is attached.
pub fn write_allocation_csv<W: Write>(
    mut w: W,
    alloc: &RecordAllocation,
    data: Option<&DataSet>,
) -> std::io::Result<()> {
    match data {
        None => writeln!(w, "record_id,user_id,silo_id")?,
        Some(d) => {
            write!(w, "record_id,user_id,silo_id")?;
            for j in 0..d.dim() {
                write!(w, ",f{j}")?;
            }
            writeln!(w, ",label")?;
        }
    }
    for (r, u, s) in alloc.iter() {
        write!(w, "{r},{u},{s}")?;
        if let Some(d) = data {
            for v in d.row(r) {
                write!(w, ",{v}")?;
            }
            write!(w, ",{}", d.label(r))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads the exchange CSV back; feature columns are optional.
pub fn read_allocation_csv<R: BufRead>(
    r: R,
) -> Result<(RecordAllocation, Option<DataSet>), AllocationError> {
    let mut users = Vec::new();
    let mut silos = Vec::new();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut dim = None;

    for (lineno, line) in r.lines().enumerate() {
        let line = line.map_err(|e| AllocationError::MalformedCsv {
            line: lineno + 1,
            reason: e.to_string(),
        })?;
        if lineno == 0 {
            let cols = line.split(',').count();
            dim = Some(cols.saturating_sub(4)); // record,user,silo[,f...,label]
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: &str| AllocationError::MalformedCsv {
            line: lineno + 1,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(bad("expected at least record_id,user_id,silo_id"));
        }
        users.push(fields[1].parse().map_err(|_| bad("bad user id"))?);
        silos.push(fields[2].parse().map_err(|_| bad("bad silo id"))?);
        if fields.len() > 3 {
            for f in &fields[3..fields.len() - 1] {
                features.push(f.parse().map_err(|_| bad("bad feature"))?);
            }
            labels.push(
                fields[fields.len() - 1]
                    .parse()
                    .map_err(|_| bad("bad label"))?,
            );
        }
    }
    let num_users = users.iter().max().map_or(1, |&m| m + 1);
    let num_silos = silos.iter().max().map_or(1, |&m| m + 1);
    let alloc = RecordAllocation::new(users, silos, num_users, num_silos)?;
    let data = match dim {
        Some(d) if d > 0 && !labels.is_empty() => Some(DataSet::new(features, labels, d)),
        _ => None,
    };
    Ok((alloc, data))
}
