//! Exhaustive enumeration of prime periodic orbits and the exact counting
//! functions built on the resulting table.
//!
//! A prime orbit is a primitive closed edge walk up to rotation. The
//! enumerator does a depth-first search over edge words from each start edge,
//! keeping only words in which the start edge has the minimal index; a closed
//! word is recorded exactly when it is the lexicographically minimal rotation
//! of its cycle (so each necklace is found once, with no dedup tables).
//! Search is pruned by the cheapest way back to the start vertex, computed
//! up front by all-pairs shortest paths over edge lengths.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::asymptotics::BoxRegion;
use crate::error::Error;
use crate::model::{integer_part, HomologyClass, MarkovFlowModel};
use crate::Result;

/// A prime periodic orbit: a primitive closed edge walk in canonical
/// (lexicographically minimal) rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeOrbit {
    /// Edge indices of the cycle in canonical rotation.
    pub edge_cycle: Vec<usize>,
    /// Total traversal time (sum of edge lengths along the cycle).
    pub length: f64,
    /// Homology class (sum of edge weights along the cycle).
    pub homology: HomologyClass,
}

impl PrimeOrbit {
    /// Build an orbit from an edge cycle, checking closure and primitivity
    /// and normalizing the rotation.
    pub fn from_cycle(model: &MarkovFlowModel, cycle: &[usize]) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Domain("empty edge cycle".into()));
        }
        let edges = model.edges();
        for &e in cycle {
            if e >= edges.len() {
                return Err(Error::Structure(format!("edge index {e} out of range")));
            }
        }
        for i in 0..cycle.len() {
            let here = &edges[cycle[i]];
            let next = &edges[cycle[(i + 1) % cycle.len()]];
            if here.target != next.source {
                return Err(Error::Domain(format!(
                    "cycle breaks between positions {i} and {}",
                    (i + 1) % cycle.len()
                )));
            }
        }
        if !is_primitive(cycle) {
            return Err(Error::Domain(
                "cycle is a power of a shorter cycle, not a prime orbit".into(),
            ));
        }
        let canonical = canonical_rotation(cycle);
        let mut length = 0.0;
        let mut homology = HomologyClass::zero(model.betti_number());
        for &e in &canonical {
            length += edges[e].length;
            homology = homology.add(&edges[e].weight);
        }
        Ok(PrimeOrbit {
            edge_cycle: canonical,
            length,
            homology,
        })
    }
}

/// Lexicographically minimal rotation of a word.
pub fn canonical_rotation(word: &[usize]) -> Vec<usize> {
    let n = word.len();
    let mut best = 0;
    for cand in 1..n {
        for i in 0..n {
            let a = word[(cand + i) % n];
            let b = word[(best + i) % n];
            if a != b {
                if a < b {
                    best = cand;
                }
                break;
            }
        }
    }
    (0..n).map(|i| word[(best + i) % n]).collect()
}

/// A word is primitive when it is not a proper power: no proper period
/// rotation maps it to itself.
pub fn is_primitive(word: &[usize]) -> bool {
    let n = word.len();
    for p in 1..n {
        if n.is_multiple_of(p) && (0..n).all(|i| word[i] == word[(i + p) % n]) {
            return false;
        }
    }
    true
}

/// Is `word` strictly smaller than all of its proper rotations? True exactly
/// for the canonical rotation of a primitive word.
fn is_minimal_primitive_rotation(word: &[usize]) -> bool {
    let n = word.len();
    for r in 1..n {
        let mut strictly_greater = false;
        for i in 0..n {
            let a = word[(r + i) % n];
            let b = word[i];
            if a != b {
                strictly_greater = a > b;
                break;
            }
        }
        // an equal rotation means a proper power; a smaller one means the
        // word is not the canonical representative
        if !strictly_greater {
            return false;
        }
    }
    true
}

/// Knobs for the enumerator.
#[derive(Debug, Clone)]
pub struct CensusOptions {
    /// Worker threads to fan the start edges over. Output is identical for
    /// every worker count.
    pub workers: usize,
    /// Hard cap on the number of orbits recorded before the run aborts with
    /// a resource error (the CLI exposes this as `--budget`).
    pub max_orbits: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            workers: 1,
            max_orbits: 10_000_000,
        }
    }
}

/// Orbit records collected from one start edge: (length, class) per orbit.
type StartEdgeRecords = Vec<(f64, HomologyClass)>;

/// One record of the orbit table: every prime orbit with this exact length
/// (bit-for-bit) and homology class.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitEntry {
    pub length: f64,
    pub homology: HomologyClass,
    pub count: u64,
}

/// Multiset of prime orbits up to a length cutoff, merged into
/// (length, homology, count) records sorted by length then class.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTable {
    k: usize,
    t_max: f64,
    entries: Vec<OrbitEntry>,
}

/// Enumerate every prime orbit of length at most `t_max`.
///
/// The output is deterministic: entries are sorted by (length, homology) and
/// the result does not depend on `options.workers`.
pub fn enumerate_prime_orbits(
    model: &MarkovFlowModel,
    t_max: f64,
    options: &CensusOptions,
) -> Result<OrbitTable> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain(format!(
            "length cutoff must be positive and finite, got {t_max}"
        )));
    }
    model.require_connected()?;
    let workers = options.workers.max(1);
    let edge_count = model.edges().len();
    let return_dist = shortest_return_distances(model);
    let recorded = AtomicU64::new(0);

    let mut per_start: Vec<StartEdgeRecords> = Vec::with_capacity(edge_count);
    if workers == 1 {
        for e0 in 0..edge_count {
            per_start.push(search_from_edge(
                model,
                t_max,
                e0,
                &return_dist,
                &recorded,
                options.max_orbits,
            )?);
        }
    } else {
        let results: Vec<Result<StartEdgeRecords>> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let return_dist = &return_dist;
                let recorded = &recorded;
                handles.push(scope.spawn(move || {
                    let mut chunk = Vec::new();
                    let mut e0 = w;
                    while e0 < edge_count {
                        chunk.push((
                            e0,
                            search_from_edge(
                                model,
                                t_max,
                                e0,
                                return_dist,
                                recorded,
                                options.max_orbits,
                            ),
                        ));
                        e0 += workers;
                    }
                    chunk
                }));
            }
            let mut slots: Vec<Option<Result<StartEdgeRecords>>> =
                (0..edge_count).map(|_| None).collect();
            for handle in handles {
                for (e0, res) in handle.join().expect("census worker panicked") {
                    slots[e0] = Some(res);
                }
            }
            slots
                .into_iter()
                .map(|s| s.expect("missing start edge"))
                .collect()
        });
        for res in results {
            per_start.push(res?);
        }
    }

    let records: Vec<(f64, HomologyClass)> = per_start.into_iter().flatten().collect();
    Ok(OrbitTable::from_records(
        model.betti_number(),
        t_max,
        records,
    ))
}

/// All-pairs minimum path length between vertices, by edge length
/// (Floyd-Warshall); distance zero from a vertex to itself.
fn shortest_return_distances(model: &MarkovFlowModel) -> Vec<Vec<f64>> {
    let n = model.vertex_count();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in model.edges() {
        if e.length < dist[e.source][e.target] {
            dist[e.source][e.target] = e.length;
        }
    }
    for mid in 0..n {
        let mid_row = dist[mid].clone();
        let mid_col: Vec<f64> = dist.iter().map(|row| row[mid]).collect();
        for (row, &base) in dist.iter_mut().zip(mid_col.iter()) {
            if !base.is_finite() {
                continue;
            }
            for (entry, &leg) in row.iter_mut().zip(mid_row.iter()) {
                let via = base + leg;
                if via < *entry {
                    *entry = via;
                }
            }
        }
    }
    dist
}

/// Depth-first search for canonical cycles whose minimal edge is `e0`.
fn search_from_edge(
    model: &MarkovFlowModel,
    t_max: f64,
    e0: usize,
    return_dist: &[Vec<f64>],
    recorded: &AtomicU64,
    max_orbits: u64,
) -> Result<StartEdgeRecords> {
    let edges = model.edges();
    let out = model.out_edges();
    let k = model.betti_number();
    // absolute slack so float rounding in the prune bound can never drop a
    // genuine cycle; recording still checks the exact accumulated length
    let slack = 1e-9 * (1.0 + t_max);
    let start_len = edges[e0].length;
    let mut found = Vec::new();
    if start_len > t_max + slack {
        return Ok(found);
    }
    let start_vertex = edges[e0].source;

    // path state: word of edge indices, partial length sums, running weight
    let mut word: Vec<usize> = vec![e0];
    let mut partial: Vec<f64> = vec![start_len];
    let mut weight: Vec<i64> = edges[e0].weight.coords().to_vec();
    // frame i holds the out-list scan position for extending word[i]
    let mut scan: Vec<usize> = vec![0];

    let record =
        |word: &[usize], length: f64, weight: &[i64], found: &mut Vec<(f64, HomologyClass)>| {
            if length <= t_max && is_minimal_primitive_rotation(word) {
                let total = recorded.fetch_add(1, Ordering::Relaxed) + 1;
                if total > max_orbits {
                    return Err(Error::Resource(format!(
                        "orbit budget of {max_orbits} exceeded; raise --budget to enumerate \
                         further"
                    )));
                }
                found.push((length, HomologyClass::new(weight.to_vec())));
            }
            Ok(())
        };

    if edges[e0].target == start_vertex {
        record(&word, start_len, &weight, &mut found)?;
    }

    while !word.is_empty() {
        let depth = word.len() - 1;
        let here = edges[*word.last().unwrap()].target;
        let mut advanced = false;
        while scan[depth] < out[here].len() {
            let e = out[here][scan[depth]];
            scan[depth] += 1;
            if e < e0 {
                continue;
            }
            let new_len = partial[depth] + edges[e].length;
            if new_len + return_dist[edges[e].target][start_vertex] > t_max + slack {
                continue;
            }
            word.push(e);
            partial.push(new_len);
            for (w, x) in weight.iter_mut().zip(edges[e].weight.coords()) {
                *w += x;
            }
            scan.push(0);
            if edges[e].target == start_vertex {
                record(&word, new_len, &weight, &mut found)?;
            }
            advanced = true;
            break;
        }
        if !advanced {
            let e = word.pop().unwrap();
            partial.pop();
            for (w, x) in weight.iter_mut().zip(edges[e].weight.coords()) {
                *w -= x;
            }
            scan.pop();
        }
    }
    debug_assert_eq!(weight, vec![0i64; k]);
    Ok(found)
}

impl OrbitTable {
    /// Merge raw (length, homology) records into a sorted table. Records with
    /// bit-identical length and equal class are combined; lengths are never
    /// merged by tolerance, so the table is schedule-independent.
    pub fn from_records(k: usize, t_max: f64, mut records: Vec<(f64, HomologyClass)>) -> Self {
        records.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let mut entries: Vec<OrbitEntry> = Vec::new();
        for (length, homology) in records {
            match entries.last_mut() {
                Some(last)
                    if last.length.to_bits() == length.to_bits() && last.homology == homology =>
                {
                    last.count += 1
                }
                _ => entries.push(OrbitEntry {
                    length,
                    homology,
                    count: 1,
                }),
            }
        }
        OrbitTable { k, t_max, entries }
    }

    /// Assemble a table directly from merged entries (used by ingestion).
    pub fn from_entries(k: usize, t_max: f64, mut entries: Vec<OrbitEntry>) -> Self {
        entries.sort_by(|a, b| {
            a.length
                .total_cmp(&b.length)
                .then_with(|| a.homology.cmp(&b.homology))
        });
        let mut merged: Vec<OrbitEntry> = Vec::new();
        for e in entries {
            match merged.last_mut() {
                Some(last)
                    if last.length.to_bits() == e.length.to_bits()
                        && last.homology == e.homology =>
                {
                    last.count += e.count
                }
                _ => merged.push(e),
            }
        }
        OrbitTable {
            k,
            t_max,
            entries: merged,
        }
    }

    pub fn betti_number(&self) -> usize {
        self.k
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn entries(&self) -> &[OrbitEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn check_range(&self, t: f64) -> Result<()> {
        if t > self.t_max {
            return Err(Error::Range(format!(
                "query at T={t} exceeds the enumerated cutoff T_max={}; counts beyond the \
                 cutoff would be silently wrong",
                self.t_max
            )));
        }
        Ok(())
    }

    fn check_dim(&self, class: &HomologyClass) -> Result<()> {
        if class.dim() != self.k {
            return Err(Error::Domain(format!(
                "homology class has dimension {}, table has k={}",
                class.dim(),
                self.k
            )));
        }
        Ok(())
    }

    /// Index of the first entry with length > t (entries are length-sorted).
    fn cutoff_index(&self, t: f64) -> usize {
        self.entries.partition_point(|e| e.length <= t)
    }

    /// Total number of prime orbits with length <= t.
    pub fn count_orbits(&self, t: f64) -> Result<u64> {
        self.check_range(t)?;
        Ok(self.entries[..self.cutoff_index(t)]
            .iter()
            .map(|e| e.count)
            .sum())
    }

    /// Number of prime orbits with length <= t in the given homology class.
    pub fn count_orbits_in_class(&self, t: f64, class: &HomologyClass) -> Result<u64> {
        self.check_range(t)?;
        self.check_dim(class)?;
        Ok(self.entries[..self.cutoff_index(t)]
            .iter()
            .filter(|e| &e.homology == class)
            .map(|e| e.count)
            .sum())
    }

    /// Orbit counts grouped by class, for lengths <= t.
    pub fn class_counts(&self, t: f64) -> Result<HashMap<HomologyClass, u64>> {
        self.check_range(t)?;
        let mut map: HashMap<HomologyClass, u64> = HashMap::new();
        for e in &self.entries[..self.cutoff_index(t)] {
            *map.entry(e.homology.clone()).or_insert(0) += e.count;
        }
        Ok(map)
    }

    /// Count in the moving window: orbits of class `alpha + floor(phi0 * t)`.
    pub fn shifted_count(&self, t: f64, alpha: &HomologyClass, phi0: &[f64]) -> Result<u64> {
        self.check_dim(alpha)?;
        let drift = integer_part(&phi0.iter().map(|p| p * t).collect::<Vec<_>>())?;
        self.count_orbits_in_class(t, &alpha.add(&drift))
    }

    /// Ordered pairs of orbits (both lengths <= t) whose classes differ by
    /// `beta`, counted literally over the table entries. Pairs of an orbit
    /// with itself are included (they land in beta = 0).
    pub fn pair_count_direct(&self, t: f64, beta: &HomologyClass) -> Result<u64> {
        self.check_range(t)?;
        self.check_dim(beta)?;
        let prefix = &self.entries[..self.cutoff_index(t)];
        let beta = beta.coords();
        let mut total: u64 = 0;
        for a in prefix {
            for b in prefix {
                let matches = a
                    .homology
                    .coords()
                    .iter()
                    .zip(b.homology.coords())
                    .zip(beta)
                    .all(|((x, y), d)| x - y == *d);
                if matches {
                    total += a.count * b.count;
                }
            }
        }
        Ok(total)
    }

    /// The same pair count through the window-count convolution:
    /// sum over alpha of windowed(alpha) * windowed(alpha + beta), where
    /// windowed(alpha) is [`Self::shifted_count`] at the same t.
    ///
    /// Exact integer identity with [`Self::pair_count_direct`] for every
    /// input: the window drift reindexes the sum without changing it.
    pub fn pair_count_convolution(
        &self,
        t: f64,
        beta: &HomologyClass,
        phi0: &[f64],
    ) -> Result<u64> {
        self.check_range(t)?;
        self.check_dim(beta)?;
        if phi0.len() != self.k {
            return Err(Error::Domain(format!(
                "winding cycle has dimension {}, table has k={}",
                phi0.len(),
                self.k
            )));
        }
        let drift = integer_part(&phi0.iter().map(|p| p * t).collect::<Vec<_>>())?;
        let mut windowed: HashMap<HomologyClass, u64> = HashMap::new();
        for (class, count) in self.class_counts(t)? {
            windowed.insert(class.sub(&drift), count);
        }
        let mut total: u64 = 0;
        for (alpha, &n) in &windowed {
            if let Some(&m) = windowed.get(&alpha.add(beta)) {
                // the factor m counts the pair member whose class leads by beta
                total += n * m;
            }
        }
        Ok(total)
    }

    /// Fraction of orbits (length <= t) whose recentred, sqrt(t)-rescaled
    /// class lies in `region`.
    pub fn empirical_clt(&self, t: f64, phi0: &[f64], region: &BoxRegion) -> Result<f64> {
        self.check_range(t)?;
        if region.dim() != self.k {
            return Err(Error::Domain(format!(
                "box has dimension {}, table has k={}",
                region.dim(),
                self.k
            )));
        }
        let total = self.count_orbits(t)?;
        if total == 0 {
            return Err(Error::UndefinedStatistic(
                "empirical distribution of an empty census".into(),
            ));
        }
        let drift = integer_part(&phi0.iter().map(|p| p * t).collect::<Vec<_>>())?;
        let scale = t.sqrt();
        let mut inside = 0u64;
        for e in &self.entries[..self.cutoff_index(t)] {
            let x: Vec<f64> = e
                .homology
                .coords()
                .iter()
                .zip(drift.coords())
                .map(|(a, s)| (a - s) as f64 / scale)
                .collect();
            if region.contains(&x) {
                inside += e.count;
            }
        }
        Ok(inside as f64 / total as f64)
    }

    /// Largest windowed class count, normalized by T^(1+k/2) e^(-hT): a
    /// boundedness diagnostic for the uniform upper bound on window counts.
    pub fn sup_normalized_count(&self, t: f64, phi0: &[f64], h: f64) -> Result<f64> {
        self.check_range(t)?;
        if h.is_nan() || h <= 0.0 {
            return Err(Error::Domain(format!("entropy must be positive, got {h}")));
        }
        // the window drift only relabels classes, so the max windowed count
        // is the max class count; the drift is still validated
        integer_part(&phi0.iter().map(|p| p * t).collect::<Vec<_>>())?;
        let best = self.class_counts(t)?.into_values().max().unwrap_or(0);
        Ok(best as f64 * t.powf(1.0 + self.k as f64 / 2.0) * (-h * t).exp())
    }

    /// Serialize as CSV: header `length,weight_1..weight_k,count`, lengths
    /// with 17 significant digits so the round trip is exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("length");
        for i in 1..=self.k {
            let _ = write!(out, ",weight_{i}");
        }
        out.push_str(",count\n");
        for e in &self.entries {
            let _ = write!(out, "{:.16e}", e.length);
            for w in e.homology.coords() {
                let _ = write!(out, ",{w}");
            }
            let _ = writeln!(out, ",{}", e.count);
        }
        out
    }

    /// Parse the CSV schema produced by [`Self::to_csv`]. Externally built
    /// tables (for instance geodesic length spectra with homology) are
    /// accepted as long as they match the schema; entries are re-sorted and
    /// merged. An empty table gets an infinite cutoff so any query range is
    /// valid against it.
    pub fn from_csv_str(text: &str) -> Result<OrbitTable> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Ingest {
            line: 1,
            message: "empty file, expected a header row".into(),
        })?;
        let cols: Vec<&str> = header.trim_end().split(',').collect();
        if cols.len() < 3 || cols[0] != "length" || cols[cols.len() - 1] != "count" {
            return Err(Error::Ingest {
                line: 1,
                message: format!("header must be length,weight_1..weight_k,count; got {header:?}"),
            });
        }
        let k = cols.len() - 2;
        for (i, c) in cols[1..=k].iter().enumerate() {
            if *c != format!("weight_{}", i + 1) {
                return Err(Error::Ingest {
                    line: 1,
                    message: format!("expected column weight_{}, got {c:?}", i + 1),
                });
            }
        }
        let mut entries = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != k + 2 {
                return Err(Error::Ingest {
                    line: line_no,
                    message: format!("expected {} fields, got {}", k + 2, fields.len()),
                });
            }
            let length: f64 = fields[0].parse().map_err(|_| Error::Ingest {
                line: line_no,
                message: format!("unparsable length {:?}", fields[0]),
            })?;
            if !(length > 0.0 && length.is_finite()) {
                return Err(Error::Ingest {
                    line: line_no,
                    message: format!("length must be positive and finite, got {length}"),
                });
            }
            let mut coords = Vec::with_capacity(k);
            for f in &fields[1..=k] {
                coords.push(f.parse::<i64>().map_err(|_| Error::Ingest {
                    line: line_no,
                    message: format!("unparsable weight {f:?}"),
                })?);
            }
            let count: u64 = fields[k + 1].parse().map_err(|_| Error::Ingest {
                line: line_no,
                message: format!("unparsable count {:?}", fields[k + 1]),
            })?;
            if count == 0 {
                return Err(Error::Ingest {
                    line: line_no,
                    message: "count must be at least 1".into(),
                });
            }
            entries.push(OrbitEntry {
                length,
                homology: HomologyClass::new(coords),
                count,
            });
        }
        let t_max = entries
            .iter()
            .map(|e| e.length)
            .fold(f64::NEG_INFINITY, f64::max);
        let t_max = if entries.is_empty() {
            f64::INFINITY
        } else {
            t_max
        };
        Ok(OrbitTable::from_entries(k, t_max, entries))
    }
}
