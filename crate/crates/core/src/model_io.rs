//! Line-oriented text format for trained models.
//!
//! The first line names the model kind; parameters follow one per line, with
//! floats written as the shortest decimal that round-trips exactly. A model
//! file is paired with the [`FeatureSpace`](crate::FeatureSpace) file its
//! inputs were expanded with.
//!
//! ```text
//! model linear
//! c 1
//! bias -0.25
//! weights 3
//! 0.5
//! ...
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::features::{FeatureDef, FeatureSpace};
use crate::learners::{
    Classifier, KernelModel, LinearModel, NeighborModel, Node, TreeModel, TreeOptions,
};

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Linear(LinearModel),
    Kernel(KernelModel),
    Neighbor(NeighborModel),
    Tree(TreeModel),
}

impl Classifier for Model {
    fn decision(&self, x: &[f64]) -> f64 {
        match self {
            Model::Linear(m) => m.decision(x),
            Model::Kernel(m) => m.decision(x),
            Model::Neighbor(m) => m.decision(x),
            Model::Tree(m) => m.decision(x),
        }
    }

    fn input_dim(&self) -> usize {
        match self {
            Model::Linear(m) => m.input_dim(),
            Model::Kernel(m) => m.input_dim(),
            Model::Neighbor(m) => m.input_dim(),
            Model::Tree(m) => m.input_dim(),
        }
    }
}

impl Model {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Linear(_) => "linear",
            Model::Kernel(_) => "kernel",
            Model::Neighbor(_) => "knn",
            Model::Tree(_) => "tree",
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("model {}\n", self.kind_name());
        match self {
            Model::Linear(m) => {
                let _ = writeln!(out, "c {}", m.c);
                let _ = writeln!(out, "bias {}", m.bias);
                let _ = writeln!(out, "weights {}", m.weights.len());
                for w in &m.weights {
                    let _ = writeln!(out, "{w}");
                }
            }
            Model::Kernel(m) => {
                let _ = writeln!(out, "c {}", m.c);
                let _ = writeln!(out, "beta {}", m.beta);
                let _ = writeln!(out, "bias {}", m.bias);
                let _ = writeln!(
                    out,
                    "support {} {}",
                    m.alphas.len(),
                    m.support_vectors.ncols()
                );
                for ((a, y), sv) in m.alphas.iter().zip(&m.labels).zip(m.support_vectors.rows()) {
                    let _ = write!(out, "{a} {y}");
                    for v in sv {
                        let _ = write!(out, " {v}");
                    }
                    out.push('\n');
                }
            }
            Model::Neighbor(m) => {
                let _ = writeln!(out, "k {}", m.k);
                let _ = writeln!(out, "points {} {}", m.labels.len(), m.points.ncols());
                for (y, row) in m.labels.iter().zip(m.points.rows()) {
                    let _ = write!(out, "{y}");
                    for v in row {
                        let _ = write!(out, " {v}");
                    }
                    out.push('\n');
                }
            }
            Model::Tree(m) => {
                let _ = writeln!(out, "input_dim {}", m.input_dim);
                let _ = writeln!(out, "max_depth {}", m.options.max_depth);
                let _ = writeln!(out, "min_leaf {}", m.options.min_leaf);
                let _ = writeln!(out, "nodes {}", count_nodes(&m.root));
                write_preorder(&m.root, &mut out);
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Model> {
        let mut r = Reader::new(text);
        let kind = r.keyed::<String>("model")?;
        let model = match kind.as_str() {
            "linear" => {
                let c = r.keyed("c")?;
                let bias = r.keyed("bias")?;
                let n: usize = r.keyed("weights")?;
                let weights = (0..n).map(|_| r.value()).collect::<Result<Vec<f64>>>()?;
                Model::Linear(LinearModel { weights, bias, c })
            }
            "kernel" => {
                let c = r.keyed("c")?;
                let beta = r.keyed("beta")?;
                let bias = r.keyed("bias")?;
                let (count, dim) = r.keyed_pair("support")?;
                let mut alphas = Vec::with_capacity(count);
                let mut labels = Vec::with_capacity(count);
                let mut flat = Vec::with_capacity(count * dim);
                for _ in 0..count {
                    let row = r.floats(dim + 2)?;
                    alphas.push(row[0]);
                    labels.push(row[1]);
                    flat.extend_from_slice(&row[2..]);
                }
                let support_vectors = Array2::from_shape_vec((count, dim), flat)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                Model::Kernel(KernelModel {
                    support_vectors,
                    alphas,
                    labels,
                    bias,
                    beta,
                    c,
                })
            }
            "knn" => {
                let k = r.keyed("k")?;
                let (count, dim) = r.keyed_pair("points")?;
                let mut labels = Vec::with_capacity(count);
                let mut flat = Vec::with_capacity(count * dim);
                for _ in 0..count {
                    let row = r.floats(dim + 1)?;
                    labels.push(row[0]);
                    flat.extend_from_slice(&row[1..]);
                }
                let points = Array2::from_shape_vec((count, dim), flat)
                    .map_err(|e| Error::Parse(e.to_string()))?;
                Model::Neighbor(NeighborModel::new(points, labels, k)?)
            }
            "tree" => {
                let input_dim = r.keyed("input_dim")?;
                let max_depth = r.keyed("max_depth")?;
                let min_leaf = r.keyed("min_leaf")?;
                let count: usize = r.keyed("nodes")?;
                let root = read_preorder(&mut r, input_dim)?;
                if count_nodes(&root) != count {
                    return Err(Error::Parse(format!("tree header promises {count} nodes")));
                }
                Model::Tree(TreeModel {
                    root,
                    input_dim,
                    options: TreeOptions {
                        max_depth,
                        min_leaf,
                    },
                })
            }
            other => return Err(Error::Parse(format!("unknown model kind {other:?}"))),
        };
        if let Some(extra) = r.next_line() {
            return Err(Error::Parse(format!("trailing content {extra:?}")));
        }
        Ok(model)
    }
}

fn count_nodes(node: &Node) -> usize {
    match node {
        Node::Leaf { .. } => 1,
        Node::Split { left, right, .. } => 1 + count_nodes(left) + count_nodes(right),
    }
}

fn write_preorder(node: &Node, out: &mut String) {
    match node {
        Node::Leaf { label, count } => {
            let _ = writeln!(out, "leaf {label} {count}");
        }
        Node::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            let _ = writeln!(out, "split {feature} {threshold}");
            write_preorder(left, out);
            write_preorder(right, out);
        }
    }
}

fn read_preorder(r: &mut Reader, input_dim: usize) -> Result<Node> {
    let line = r
        .next_line()
        .ok_or_else(|| Error::Parse("tree ends early".into()))?;
    let f: Vec<&str> = line.split_whitespace().collect();
    match f.as_slice() {
        ["leaf", label, count] => Ok(Node::Leaf {
            label: parse(label)?,
            count: parse(count)?,
        }),
        ["split", feature, threshold] => {
            let feature: usize = parse(feature)?;
            if feature >= input_dim {
                return Err(Error::Parse(format!(
                    "split on feature {feature} of a {input_dim}-dimensional tree"
                )));
            }
            let threshold = parse(threshold)?;
            let left = Box::new(read_preorder(r, input_dim)?);
            let right = Box::new(read_preorder(r, input_dim)?);
            Ok(Node::Split {
                feature,
                threshold,
                left,
                right,
            })
        }
        _ => Err(Error::Parse(format!("bad tree line {line:?}"))),
    }
}

fn parse<T: FromStr>(s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse field {s:?}")))
}

struct Reader<'a> {
    lines: std::iter::Filter<std::str::Lines<'a>, fn(&&str) -> bool>,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        let keep: fn(&&str) -> bool = |l| !l.trim().is_empty();
        Reader {
            lines: text.lines().filter(keep),
        }
    }

    fn next_line(&mut self) -> Option<&'a str> {
        self.lines.next()
    }

    fn fields(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let line = self
            .next_line()
            .ok_or_else(|| Error::Parse(format!("missing {key:?} line")))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.first() != Some(&key) {
            return Err(Error::Parse(format!("expected {key:?}, found {line:?}")));
        }
        Ok(f[1..].to_vec())
    }

    fn keyed<T: FromStr>(&mut self, key: &str) -> Result<T> {
        match self.fields(key)?.as_slice() {
            [v] => parse(v),
            other => Err(Error::Parse(format!("{key}: expected one value, got {other:?}"))),
        }
    }

    fn keyed_pair(&mut self, key: &str) -> Result<(usize, usize)> {
        match self.fields(key)?.as_slice() {
            [a, b] => Ok((parse(a)?, parse(b)?)),
            other => Err(Error::Parse(format!("{key}: expected two values, got {other:?}"))),
        }
    }

    fn value(&mut self) -> Result<f64> {
        let line = self
            .next_line()
            .ok_or_else(|| Error::Parse("file ends early".into()))?;
        parse(line.trim())
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>> {
        let line = self
            .next_line()
            .ok_or_else(|| Error::Parse("file ends early".into()))?;
        let v = line
            .split_whitespace()
            .map(parse)
            .collect::<Result<Vec<f64>>>()?;
        if v.len() != n {
            return Err(Error::Parse(format!("expected {n} values, got {}", v.len())));
        }
        Ok(v)
    }
}

/// Human-readable listing of a model over its feature space.
///
/// Linear models list every feature by decreasing |weight|; other kinds get
/// a short summary since their parameters are not per-feature.
pub fn inspect(model: &Model, space: &FeatureSpace) -> Result<String> {
    if model.input_dim() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            found: model.input_dim(),
        });
    }
    let mut out = String::new();
    match model {
        Model::Linear(m) => {
            let _ = writeln!(out, "linear model, C={} bias={}", m.c, m.bias);
            let _ = writeln!(out, "{:>4}  {:>7}  {:<10}  {:>12}  parameters", "rank", "feature", "kind", "weight");
            let mut order: Vec<usize> = (0..m.weights.len()).collect();
            order.sort_by(|&a, &b| m.weights[b].abs().total_cmp(&m.weights[a].abs()).then(a.cmp(&b)));
            for (rank, &i) in order.iter().enumerate() {
                let def = &space.defs()[i];
                let _ = writeln!(
                    out,
                    "{:>4}  {:>7}  {:<10}  {:>12.6}  {}",
                    rank + 1,
                    i + 1,
                    def.kind_name(),
                    m.weights[i],
                    describe(def)
                );
            }
        }
        Model::Kernel(m) => {
            let _ = writeln!(
                out,
                "kernel model, C={} beta={} bias={}, {} support vectors over {} features",
                m.c,
                m.beta,
                m.bias,
                m.alphas.len(),
                space.len()
            );
        }
        Model::Neighbor(m) => {
            let _ = writeln!(
                out,
                "knn model, k={}, {} stored points over {} features",
                m.k,
                m.labels.len(),
                space.len()
            );
        }
        Model::Tree(m) => {
            let _ = writeln!(
                out,
                "tree model, depth {}, {} leaves over {} features",
                m.root.depth(),
                m.root.leaves(),
                space.len()
            );
            let mut used = Vec::new();
            collect_splits(&m.root, &mut used);
            used.sort_unstable();
            used.dedup();
            for i in used {
                let def = &space.defs()[i];
                let _ = writeln!(out, "  split on feature {} ({}) {}", i + 1, def.kind_name(), describe(def));
            }
        }
    }
    Ok(out)
}

fn collect_splits(node: &Node, out: &mut Vec<usize>) {
    if let Node::Split { feature, left, right, .. } = node {
        out.push(*feature);
        collect_splits(left, out);
        collect_splits(right, out);
    }
}

fn short_vector(v: &[f64]) -> String {
    const SHOWN: usize = 8;
    let mut parts: Vec<String> = v.iter().take(SHOWN).map(|x| format!("{x:.3}")).collect();
    if v.len() > SHOWN {
        parts.push(format!("... ({} total)", v.len()));
    }
    format!("[{}]", parts.join(", "))
}

fn describe(def: &FeatureDef) -> String {
    match def {
        FeatureDef::Original { column } => format!("column {}", column + 1),
        FeatureDef::Projection { direction } => format!("w={}", short_vector(direction)),
        FeatureDef::Window {
            direction,
            lower,
            upper,
            class,
        } => format!("class {class} on [{lower:.4}, {upper:.4}] of w={}", short_vector(direction)),
        FeatureDef::Kernel { anchor, beta } => format!("beta={beta} anchor={}", short_vector(anchor)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn round_trip(m: Model) {
        let text = m.to_text();
        let back = Model::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn linear_round_trip_keeps_every_bit() {
        round_trip(Model::Linear(LinearModel {
            weights: vec![0.1, -2.0, 1.0 / 3.0, f64::MIN_POSITIVE],
            bias: -0.25,
            c: 8.0,
        }));
    }

    #[test]
    fn kernel_and_knn_round_trip() {
        round_trip(Model::Kernel(KernelModel {
            support_vectors: array![[0.5, -1.5], [2.0, 1.0 / 7.0]],
            alphas: vec![0.3, 0.3],
            labels: vec![1.0, -1.0],
            bias: 1e-9,
            beta: 0.03125,
            c: 4.0,
        }));
        round_trip(Model::Neighbor(
            NeighborModel::new(array![[0.0], [1.0], [2.0]], vec![1.0, -1.0, 1.0], 3).unwrap(),
        ));
    }

    #[test]
    fn tree_preorder_round_trip() {
        let root = Node::Split {
            feature: 1,
            threshold: 0.5,
            left: Box::new(Node::Leaf { label: 1.0, count: 4 }),
            right: Box::new(Node::Split {
                feature: 0,
                threshold: -2.25,
                left: Box::new(Node::Leaf { label: -1.0, count: 2 }),
                right: Box::new(Node::Leaf { label: 1.0, count: 3 }),
            }),
        };
        let m = Model::Tree(TreeModel {
            root,
            input_dim: 2,
            options: TreeOptions::default(),
        });
        let text = m.to_text();
        let body: Vec<&str> = text.lines().skip(5).collect();
        assert_eq!(
            body,
            ["split 1 0.5", "leaf 1 4", "split 0 -2.25", "leaf -1 2", "leaf 1 3"]
        );
        round_trip(m);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(Model::from_text("").is_err());
        assert!(Model::from_text("model perceptron\n").is_err());
        assert!(Model::from_text("model linear\nc 1\nbias 0\nweights 2\n0.5\n").is_err());
        assert!(Model::from_text("model linear\nc 1\nbias 0\nweights 1\n0.5\n0.5\n").is_err());
        assert!(Model::from_text(
            "model tree\ninput_dim 1\nmax_depth 2\nmin_leaf 1\nnodes 3\nsplit 4 0\nleaf 1 1\nleaf -1 1\n"
        )
        .is_err());
    }

    fn originals(n: usize) -> FeatureSpace {
        let mut space = FeatureSpace::new(n);
        for column in 0..n {
            space
                .push(
                    FeatureDef::Original { column },
                    crate::features::Provenance {
                        family: crate::Family::X,
                        pass: 0,
                    },
                )
                .unwrap();
        }
        space
    }

    #[test]
    fn inspect_orders_by_absolute_weight() {
        let m = Model::Linear(LinearModel {
            weights: vec![0.1, -2.0, 0.5],
            bias: 0.0,
            c: 1.0,
        });
        let text = inspect(&m, &originals(3)).unwrap();
        let features: Vec<&str> = text
            .lines()
            .skip(2)
            .map(|l| l.split_whitespace().nth(1).unwrap())
            .collect();
        assert_eq!(features, ["2", "3", "1"]);
    }

    #[test]
    fn inspect_empty_model_is_header_only() {
        let m = Model::Linear(LinearModel {
            weights: vec![],
            bias: 0.0,
            c: 1.0,
        });
        assert_eq!(inspect(&m, &originals(0)).unwrap().lines().count(), 2);
    }

    #[test]
    fn inspect_rejects_size_mismatch() {
        let m = Model::Linear(LinearModel {
            weights: vec![1.0, 2.0],
            bias: 0.0,
            c: 1.0,
        });
        assert!(inspect(&m, &originals(3)).is_err());
    }
}
