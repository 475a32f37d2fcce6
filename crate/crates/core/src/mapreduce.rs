//! A local map/reduce runner: map tasks over key/value inputs, group the
//! emitted pairs by key, then reduce each group. Map and reduce tasks may
//! run on a worker pool; the reduce phase never starts before every map
//! task has finished.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;

/// A map/reduce job over in-memory key/value pairs.
///
/// `map_fn` takes one input pair and emits intermediate pairs; the runner
/// groups those by key (exact equality) and calls `reduce_fn` once per
/// distinct key. Output is the concatenation of the reduce emissions in
/// ascending key order, which makes the result deterministic regardless
/// of worker count.
pub struct MapReduceJob<K1, V1, M, R> {
    pub inputs: Vec<(K1, V1)>,
    pub map_fn: M,
    pub reduce_fn: R,
}

impl<K1, V1, M, R> MapReduceJob<K1, V1, M, R>
where
    K1: Send,
    V1: Send,
{
    /// Runs the job on `workers` threads (1 runs everything inline).
    ///
    /// The first failing task (in input order for maps, key order for
    /// reduces) aborts the job; no partial results are returned.
    ///
    /// # Panics
    /// Panics when called with no inputs.
    pub fn run<K2, V2, K3, V3, E>(self, workers: usize) -> Result<Vec<(K3, V3)>, E>
    where
        M: Fn(K1, V1) -> Result<Vec<(K2, V2)>, E> + Sync,
        R: Fn(K2, Vec<V2>) -> Result<Vec<(K3, V3)>, E> + Sync,
        K2: Ord + Send,
        V2: Send,
        K3: Send,
        V3: Send,
        E: Send,
    {
        assert!(
            !self.inputs.is_empty(),
            "map/reduce job requires at least one input"
        );
        let map_fn = &self.map_fn;
        let map_outputs = run_tasks(self.inputs, workers, |(key, value)| map_fn(key, value));
        // Barrier: every map task has completed before grouping starts.
        let mut groups: BTreeMap<K2, Vec<V2>> = BTreeMap::new();
        for output in map_outputs {
            for (key, value) in output? {
                groups.entry(key).or_default().push(value);
            }
        }
        if groups.is_empty() {
            return Ok(Vec::new());
        }

        let reduce_fn = &self.reduce_fn;
        let reduce_inputs: Vec<(K2, Vec<V2>)> = groups.into_iter().collect();
        let reduce_outputs = run_tasks(reduce_inputs, workers, |(key, values)| {
            reduce_fn(key, values)
        });
        let mut results = Vec::new();
        for output in reduce_outputs {
            results.extend(output?);
        }
        Ok(results)
    }
}

/// Runs `tasks` through `f`, preserving input order in the output.
/// With more than one worker, tasks are pulled from a shared queue by
/// scoped threads; outputs land in their input slot, so scheduling cannot
/// change the result.
fn run_tasks<T, O>(tasks: Vec<T>, workers: usize, f: impl Fn(T) -> O + Sync) -> Vec<O>
where
    T: Send,
    O: Send,
{
    let count = tasks.len();
    if workers <= 1 || count <= 1 {
        return tasks.into_iter().map(f).collect();
    }
    let queue: Mutex<VecDeque<(usize, T)>> = Mutex::new(tasks.into_iter().enumerate().collect());
    let slots: Vec<Mutex<Option<O>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers.min(count) {
            scope.spawn(|| loop {
                let next = queue.lock().expect("queue lock").pop_front();
                let Some((index, task)) = next else { break };
                let output = f(task);
                *slots[index].lock().expect("slot lock") = Some(output);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("slot lock")
                .expect("every task ran to completion")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn word_count(lines: Vec<&str>, workers: usize) -> Vec<(String, usize)> {
        let job = MapReduceJob {
            inputs: lines.into_iter().enumerate().collect(),
            map_fn: |_line_no: usize, line: &str| -> Result<Vec<(String, usize)>, ()> {
                Ok(line.split_whitespace().map(|w| (w.to_string(), 1)).collect())
            },
            reduce_fn: |word: String, counts: Vec<usize>| -> Result<Vec<(String, usize)>, ()> {
                Ok(vec![(word, counts.iter().sum())])
            },
        };
        job.run(workers).unwrap()
    }

    #[test]
    fn word_count_example() {
        assert_eq!(
            word_count(vec!["a b", "b"], 1),
            vec![("a".to_string(), 1), ("b".to_string(), 2)]
        );
    }

    #[test]
    fn identity_map_and_reduce() {
        let job = MapReduceJob {
            inputs: vec![("k", 7)],
            map_fn: |key: &'static str, value: i32| -> Result<_, ()> { Ok(vec![(key, value)]) },
            reduce_fn: |key: &'static str, values: Vec<i32>| -> Result<_, ()> {
                Ok(values.into_iter().map(|v| (key, v)).collect())
            },
        };
        assert_eq!(job.run(1).unwrap(), vec![("k", 7)]);
    }

    #[test]
    fn map_emitting_nothing_yields_empty_output() {
        let job = MapReduceJob {
            inputs: vec![(0, 0)],
            map_fn: |_: i32, _: i32| -> Result<Vec<(i32, i32)>, ()> { Ok(vec![]) },
            reduce_fn: |key: i32, values: Vec<i32>| -> Result<Vec<(i32, i32)>, ()> {
                Ok(values.into_iter().map(|v| (key, v)).collect())
            },
        };
        assert_eq!(job.run(2).unwrap(), vec![]);
    }

    #[test]
    fn first_map_error_aborts_the_job() {
        let job = MapReduceJob {
            inputs: vec![(0, "ok"), (1, "bad"), (2, "worse")],
            map_fn: |index: i32, tag: &str| -> Result<Vec<(i32, i32)>, String> {
                if tag == "ok" {
                    Ok(vec![(index, 1)])
                } else {
                    Err(format!("task {index} failed"))
                }
            },
            reduce_fn: |key: i32, values: Vec<i32>| -> Result<Vec<(i32, i32)>, String> {
                Ok(values.into_iter().map(|v| (key, v)).collect())
            },
        };
        assert_eq!(job.run(4).unwrap_err(), "task 1 failed");
    }

    #[test]
    fn reduce_error_propagates() {
        let job = MapReduceJob {
            inputs: vec![(1, 1), (2, 2)],
            map_fn: |key: i32, value: i32| -> Result<_, String> { Ok(vec![(key, value)]) },
            reduce_fn: |key: i32, _: Vec<i32>| -> Result<Vec<(i32, i32)>, String> {
                Err(format!("reduce {key} failed"))
            },
        };
        // Groups reduce in key order, so key 1 reports first.
        assert_eq!(job.run(3).unwrap_err(), "reduce 1 failed");
    }

    #[test]
    fn reduce_starts_only_after_all_maps_finish() {
        let maps_done = AtomicUsize::new(0);
        let total = 16;
        let job = MapReduceJob {
            inputs: (0..total).map(|i| (i % 4, i)).collect::<Vec<(usize, usize)>>(),
            map_fn: |key: usize, value: usize| -> Result<_, String> {
                // Stagger completion to give stragglers a chance to expose
                // a broken barrier.
                std::thread::sleep(std::time::Duration::from_millis((value % 5) as u64));
                maps_done.fetch_add(1, Ordering::SeqCst);
                Ok(vec![(key, value)])
            },
            reduce_fn: |key: usize, values: Vec<usize>| -> Result<_, String> {
                assert_eq!(
                    maps_done.load(Ordering::SeqCst),
                    total,
                    "reduce observed an unfinished map phase"
                );
                Ok(vec![(key, values.len())])
            },
        };
        let output = job.run(8).unwrap();
        assert_eq!(output.len(), 4);
        assert!(output.iter().all(|&(_, n)| n == 4));
    }

    #[test]
    fn output_is_independent_of_worker_count() {
        let lines = vec!["c a b", "a a", "b c", "d"];
        let single = word_count(lines.clone(), 1);
        for workers in [2, 4, 8] {
            assert_eq!(word_count(lines.clone(), workers), single);
        }
    }
}
