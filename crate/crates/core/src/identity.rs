//! Appearance verification: uniform appearance sampling along a trace, the
//! sample-by-sample similarity matrix, and the best-column-mean decision
//! score. Embedding providers are pluggable; the crate ships a 3D HSV color
//! histogram baseline and a ground-truth oracle for tests.

use crate::frame::Crop;
use crate::tracker::Trace;

/// Maps an image crop to a feature vector. Implementations must be pure
/// functions of the crop so matrix construction can fan out across threads.
pub trait EmbeddingPort: Send + Sync {
    fn embed(&self, crop: &Crop) -> Vec<f64>;

    /// Similarity of two feature vectors in [0, 1].
    fn similarity(&self, a: &[f64], b: &[f64]) -> f64 {
        cosine_01(a, b)
    }
}

fn cosine_01(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// A set of appearance crops for one person or object.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub subject: String,
    pub crops: Vec<Crop>,
    /// True when fewer crops were available than requested.
    pub degenerate: bool,
}

/// Pick `count` crops uniformly spread over the trace's lifetime.
///
/// Target frames are first_seen + round(k * span / (count - 1)); each target
/// snaps to the nearest recorded sample. Traces shorter than `count` yield
/// all their crops and are flagged degenerate.
pub fn sample_person(trace: &Trace, count: usize) -> SampleSet {
    let subject = format!("{}", trace.person);
    let samples = &trace.samples;
    if samples.len() <= count {
        return SampleSet {
            subject,
            crops: samples.iter().map(|s| s.crop.clone()).collect(),
            degenerate: samples.len() < count,
        };
    }
    let first = samples[0].frame;
    let last = samples[samples.len() - 1].frame;
    let span = (last - first) as f64;
    let mut crops = Vec::with_capacity(count);
    for k in 0..count {
        let target = first + (k as f64 * span / (count - 1) as f64).round() as u64;
        // Nearest available sample; ties pick the earlier one.
        let idx = match samples.binary_search_by(|s| s.frame.cmp(&target)) {
            Ok(i) => i,
            Err(i) => {
                if i == 0 {
                    0
                } else if i >= samples.len() {
                    samples.len() - 1
                } else {
                    let before = target - samples[i - 1].frame;
                    let after = samples[i].frame - target;
                    if after < before {
                        i
                    } else {
                        i - 1
                    }
                }
            }
        };
        crops.push(samples[idx].crop.clone());
    }
    SampleSet {
        subject,
        crops,
        degenerate: false,
    }
}

/// Pairwise similarity of two sample sets: rows are `a` (owner), columns are
/// `b` (candidate).
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub rows: usize,
    pub cols: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        assert_eq!(rows * cols, values.len());
        SimilarityMatrix { rows, cols, values }
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.values[n * self.cols + m]
    }
}

/// Build the similarity matrix. With `threads > 1` the embeddings are
/// computed on scoped worker threads and merged back by index, so the result
/// does not depend on the thread count.
pub fn similarity_matrix(
    a: &SampleSet,
    b: &SampleSet,
    emb: &dyn EmbeddingPort,
    threads: usize,
) -> SimilarityMatrix {
    let embed_all = |crops: &[Crop]| -> Vec<Vec<f64>> {
        if threads <= 1 || crops.len() < 2 {
            return crops.iter().map(|c| emb.embed(c)).collect();
        }
        let workers = threads.min(crops.len());
        let mut out: Vec<Vec<f64>> = vec![Vec::new(); crops.len()];
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (w, chunk) in crops.chunks(crops.len().div_ceil(workers)).enumerate() {
                handles.push((w, scope.spawn(move || {
                    chunk.iter().map(|c| emb.embed(c)).collect::<Vec<_>>()
                })));
            }
            let chunk_len = crops.len().div_ceil(workers);
            for (w, h) in handles {
                let vecs = h.join().expect("embedding worker panicked");
                for (i, v) in vecs.into_iter().enumerate() {
                    out[w * chunk_len + i] = v;
                }
            }
        });
        out
    };
    let ea = embed_all(&a.crops);
    let eb = embed_all(&b.crops);
    let mut values = Vec::with_capacity(ea.len() * eb.len());
    for va in &ea {
        for vb in &eb {
            values.push(emb.similarity(va, vb));
        }
    }
    SimilarityMatrix::from_values(ea.len(), eb.len(), values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    pub is_same: bool,
    pub score: f64,
}

/// Decision score: the best column mean, i.e. the candidate sample that is on
/// average most similar to every owner sample. Same identity if it beats the
/// threshold.
pub fn verify(m: &SimilarityMatrix, threshold: f64) -> Verification {
    if m.rows == 0 || m.cols == 0 {
        return Verification {
            is_same: false,
            score: 0.0,
        };
    }
    let mut best = f64::NEG_INFINITY;
    for col in 0..m.cols {
        let mut sum = 0.0;
        for row in 0..m.rows {
            sum += m.get(row, col);
        }
        best = best.max(sum / m.rows as f64);
    }
    Verification {
        is_same: best > threshold,
        score: best,
    }
}

/// Objects carry one canonical crop each, so object verification is a single
/// pairwise comparison.
pub fn verify_object(
    a: &Crop,
    b: &Crop,
    emb: &dyn EmbeddingPort,
    threshold: f64,
) -> Verification {
    let score = emb.similarity(&emb.embed(a), &emb.embed(b));
    Verification {
        is_same: score > threshold,
        score,
    }
}

/// 3D HSV color histogram (8 hue x 8 saturation x 4 value bins), cosine
/// similarity. Coarse, but separates differently colored clothing and bags.
pub struct HistogramEmbedder;

fn rgb_to_hsv(rgb: [u8; 3]) -> (f64, f64, f64) {
    let r = rgb[0] as f64 / 255.0;
    let g = rgb[1] as f64 / 255.0;
    let b = rgb[2] as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    let h = if d == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / d).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / d + 2.0)
    } else {
        60.0 * ((r - g) / d + 4.0)
    };
    let s = if max == 0.0 { 0.0 } else { d / max };
    (h, s, max)
}

impl EmbeddingPort for HistogramEmbedder {
    fn embed(&self, crop: &Crop) -> Vec<f64> {
        const HB: usize = 8;
        const SB: usize = 8;
        const VB: usize = 4;
        let mut hist = vec![0.0f64; HB * SB * VB];
        for y in 0..crop.height {
            for x in 0..crop.width {
                let (h, s, v) = rgb_to_hsv(crop.pixel(x, y));
                let hi = ((h / 360.0 * HB as f64) as usize).min(HB - 1);
                let si = ((s * SB as f64) as usize).min(SB - 1);
                let vi = ((v * VB as f64) as usize).min(VB - 1);
                hist[(hi * SB + si) * VB + vi] += 1.0;
            }
        }
        let total = (crop.width * crop.height) as f64;
        for v in &mut hist {
            *v /= total;
        }
        hist
    }
}

/// Test oracle: identity is the ground-truth entity tag carried by the crop.
/// Crops without a tag all collapse to one "unknown" identity.
pub struct OracleEmbedder;

fn entity_code(crop: &Crop) -> f64 {
    match crop.gt_entity.as_deref() {
        None => -1.0,
        Some(name) => {
            let mut h: u64 = 0xcbf29ce484222325;
            for b in name.as_bytes() {
                h ^= *b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
            (h >> 16) as f64
        }
    }
}

impl EmbeddingPort for OracleEmbedder {
    fn embed(&self, crop: &Crop) -> Vec<f64> {
        vec![entity_code(crop)]
    }

    fn similarity(&self, a: &[f64], b: &[f64]) -> f64 {
        if a == b {
            1.0
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{BBox, Point};
    use crate::tracker::{PersonId, TraceSample};
    use proptest::prelude::*;

    fn crop(rgb: [u8; 3], gt: Option<&str>) -> Crop {
        Crop {
            width: 4,
            height: 4,
            frame_index: 0,
            pixels: (0..16).flat_map(|_| rgb).collect(),
            gt_entity: gt.map(|s| s.to_string()),
        }
    }

    fn trace_over(frames: impl IntoIterator<Item = u64>) -> Trace {
        let samples = frames
            .into_iter()
            .map(|f| TraceSample {
                frame: f,
                point: Point::new(0.0, 0.0),
                bbox: BBox::new(0, 0, 2, 2),
                crop: Crop {
                    width: 1,
                    height: 1,
                    frame_index: f,
                    pixels: vec![0, 0, 0],
                    gt_entity: None,
                },
            })
            .collect();
        Trace {
            person: PersonId(1),
            samples,
            alive: true,
            confirmed: true,
        }
    }

    #[test]
    fn sampling_exact_length_returns_all_in_order() {
        let t = trace_over(100..120);
        let s = sample_person(&t, 20);
        assert!(!s.degenerate);
        let frames: Vec<u64> = s.crops.iter().map(|c| c.frame_index).collect();
        assert_eq!(frames, (100..120).collect::<Vec<_>>());
    }

    #[test]
    fn sampling_uniform_spacing_over_200_frames() {
        let t = trace_over(0..200);
        let s = sample_person(&t, 20);
        let frames: Vec<u64> = s.crops.iter().map(|c| c.frame_index).collect();
        // Arithmetic oracle: round(k * 199 / 19) for k = 0..19.
        let expect: Vec<u64> = (0..20)
            .map(|k| (k as f64 * 199.0 / 19.0).round() as u64)
            .collect();
        assert_eq!(frames, expect);
    }

    #[test]
    fn sampling_short_trace_is_degenerate() {
        let t = trace_over([3, 4, 5, 9, 10]);
        let s = sample_person(&t, 20);
        assert!(s.degenerate);
        assert_eq!(s.crops.len(), 5);
    }

    #[test]
    fn self_similarity_matrix_has_unit_diagonal() {
        let set = SampleSet {
            subject: "a".into(),
            crops: vec![crop([200, 10, 10], None), crop([10, 200, 10], None)],
            degenerate: false,
        };
        let m = similarity_matrix(&set, &set, &HistogramEmbedder, 1);
        assert!((m.get(0, 0) - 1.0).abs() < 1e-9);
        assert!((m.get(1, 1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_colors_have_zero_similarity() {
        // Pure red vs pure blue crops land in disjoint histogram bins.
        let red = SampleSet {
            subject: "red".into(),
            crops: vec![crop([255, 0, 0], None)],
            degenerate: true,
        };
        let blue = SampleSet {
            subject: "blue".into(),
            crops: vec![crop([0, 0, 255], None)],
            degenerate: true,
        };
        let m = similarity_matrix(&red, &blue, &HistogramEmbedder, 1);
        assert!(m.get(0, 0) < 1e-9);
    }

    #[test]
    fn oracle_matches_iff_same_entity() {
        let a = SampleSet {
            subject: "a".into(),
            crops: vec![crop([1, 2, 3], Some("p1")), crop([9, 9, 9], Some("p1"))],
            degenerate: false,
        };
        let b = SampleSet {
            subject: "b".into(),
            crops: vec![crop([5, 5, 5], Some("p1"))],
            degenerate: false,
        };
        let c = SampleSet {
            subject: "c".into(),
            crops: vec![crop([5, 5, 5], Some("p2"))],
            degenerate: false,
        };
        let same = similarity_matrix(&a, &b, &OracleEmbedder, 1);
        assert!(verify(&same, 0.5).is_same);
        assert!(same.values.iter().all(|&v| v == 1.0));
        let diff = similarity_matrix(&a, &c, &OracleEmbedder, 1);
        assert!(!verify(&diff, 0.5).is_same);
    }

    #[test]
    fn verify_examples() {
        let ones = SimilarityMatrix::from_values(3, 3, vec![1.0; 9]);
        let v = verify(&ones, 0.99);
        assert!(v.is_same && v.score == 1.0);

        let zeros = SimilarityMatrix::from_values(3, 3, vec![0.0; 9]);
        let v = verify(&zeros, 0.1);
        assert!(!v.is_same && v.score == 0.0);

        // One strong column among weak ones: score is that column's mean.
        let mut vals = vec![0.1; 12];
        for row in 0..3 {
            vals[row * 4 + 2] = 0.9;
        }
        let m = SimilarityMatrix::from_values(3, 4, vals);
        let v = verify(&m, 0.5);
        assert!((v.score - 0.9).abs() < 1e-12);
        // Brute force over all columns agrees.
        let brute = (0..4)
            .map(|c| (0..3).map(|r| m.get(r, c)).sum::<f64>() / 3.0)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(v.score, brute);
    }

    #[test]
    fn verify_object_pairs() {
        let a = crop([200, 10, 10], None);
        let b = crop([200, 10, 10], None);
        assert!(verify_object(&a, &b, &HistogramEmbedder, 0.5).is_same);
        // Red bag vs blue bag under the histogram embedder.
        let blue = crop([10, 10, 200], None);
        let v = verify_object(&a, &blue, &HistogramEmbedder, 0.5);
        assert!(!v.is_same && v.score < 0.5);
        // Oracle: different ground-truth ids never match.
        let x = crop([1, 1, 1], Some("bagA"));
        let y = crop([1, 1, 1], Some("bagB"));
        assert!(!verify_object(&x, &y, &OracleEmbedder, 0.5).is_same);
    }

    #[test]
    fn threaded_matrix_equals_serial() {
        let crops: Vec<Crop> = (0..7)
            .map(|i| crop([(i * 30) as u8, 100, (255 - i * 20) as u8], None))
            .collect();
        let a = SampleSet {
            subject: "a".into(),
            crops: crops.clone(),
            degenerate: false,
        };
        let serial = similarity_matrix(&a, &a, &HistogramEmbedder, 1);
        let threaded = similarity_matrix(&a, &a, &HistogramEmbedder, 4);
        assert_eq!(serial, threaded);
    }

    proptest! {
        #[test]
        fn verify_bounds_and_permutation_invariance(
            rows in 1usize..6, cols in 1usize..6,
            seed in 0u64..1000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let vals: Vec<f64> = (0..rows * cols).map(|_| rng.gen()).collect();
            let m = SimilarityMatrix::from_values(rows, cols, vals.clone());
            let v = verify(&m, 0.5);
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(v.score >= lo - 1e-12 && v.score <= hi + 1e-12);

            // Permute rows and columns; the score may only move by float noise.
            let mut order_r: Vec<usize> = (0..rows).collect();
            let mut order_c: Vec<usize> = (0..cols).collect();
            for i in (1..rows).rev() {
                order_r.swap(i, rng.gen_range(0..=i));
            }
            for i in (1..cols).rev() {
                order_c.swap(i, rng.gen_range(0..=i));
            }
            let mut permuted = Vec::with_capacity(vals.len());
            for &r in &order_r {
                for &c in &order_c {
                    permuted.push(m.get(r, c));
                }
            }
            let mp = SimilarityMatrix::from_values(rows, cols, permuted);
            prop_assert!((verify(&mp, 0.5).score - v.score).abs() < 1e-9);
        }
    }
}
