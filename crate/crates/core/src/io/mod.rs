mod model_file;
mod survey_csv;

pub use model_file::*;
pub use survey_csv::*;
