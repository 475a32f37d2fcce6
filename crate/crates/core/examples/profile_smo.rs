use polarity_core::svm::{train_binary, SolverConfig};
use polarity_core::testkit::blob_dataset;
use std::time::Instant;

fn main() {
    for (margin, noise) in [(1.2, 0.0), (1.8, 0.01), (2.5, 0.05), (1.2, 0.08)] {
        let data = blob_dataset(2000, 1000, 20, margin, noise);
        let config = SolverConfig { seed: 1, ..SolverConfig::default() };
        let t = Instant::now();
        let model = train_binary(&data, &config).unwrap();
        println!(
            "margin {margin} noise {noise}: {:?}, {} SVs",
            t.elapsed(),
            model.num_support_vectors()
        );
    }
}
