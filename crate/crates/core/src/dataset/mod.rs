//! Feature extraction and corpus persistence.

mod features;
mod matrix_file;
mod records;

pub use features::{extract_features, normalize_corpus, Normalization};
pub use matrix_file::{read_matrix, write_matrix, FeatureMatrix, MATRIX_MAGIC, MATRIX_VERSION};
pub use records::{read_dataset, read_records, write_dataset, write_records, FormRecord, FEATURES_FILE, RECORDS_FILE};
