//! Seeded standardized inputs, so runtime measurements compare like with like.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{ArgSpec, TaskSpec};

/// Everything the child process needs to call the entry point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputBundle {
    pub task_id: String,
    pub seed: u64,
    pub entry_point: String,
    pub args: Vec<Value>,
}

impl InputBundle {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("bundle serializes")
    }
}

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, min: f64, max: f64) -> Value {
    let m: Vec<Vec<f64>> =
        (0..rows).map(|_| (0..cols).map(|_| round6(min + (max - min) * rng.random::<f64>())).collect()).collect();
    json!(m)
}

/// Generates the argument list for `task`. A pure function of `(task, seed)`.
pub fn standardized_inputs(task: &TaskSpec, seed: u64) -> InputBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(&task.id));
    let mut args: Vec<Value> = Vec::with_capacity(task.input_spec.args.len());
    for spec in &task.input_spec.args {
        let value = match spec {
            ArgSpec::IntArray { len, min, max } => {
                let v: Vec<i64> = (0..*len).map(|_| rng.random_range(*min..=*max)).collect();
                json!(v)
            }
            ArgSpec::FloatMatrix { rows, cols, min, max } => matrix(&mut rng, *rows, *cols, *min, *max),
            ArgSpec::SquareMatrix { size, min, max } => matrix(&mut rng, *size, *size, *min, *max),
            ArgSpec::Adjacency { nodes, density } => {
                let mut m = vec![vec![0u8; *nodes]; *nodes];
                let mut edges = 0;
                for (i, row) in m.iter_mut().enumerate() {
                    for (j, cell) in row.iter_mut().enumerate() {
                        if i != j && rng.random::<f64>() < *density {
                            *cell = 1;
                            edges += 1;
                        }
                    }
                }
                if edges == 0 {
                    m[0][1] = 1;
                }
                json!(m)
            }
            ArgSpec::Text { len, alphabet } => {
                let chars: Vec<char> = alphabet.chars().collect();
                let s: String = (0..*len).map(|_| chars[rng.random_range(0..chars.len())]).collect();
                json!(s)
            }
            ArgSpec::Substring { of, len } => {
                let text: Vec<char> = args[*of].as_str().unwrap_or_default().chars().collect();
                let start = rng.random_range(0..=text.len() - len);
                json!(text[start..start + len].iter().collect::<String>())
            }
            ArgSpec::Int { value } => json!(value),
            ArgSpec::Float { value } => json!(value),
        };
        args.push(value);
    }
    InputBundle { task_id: task.id.clone(), seed, entry_point: task.entry_point.name.clone(), args }
}
