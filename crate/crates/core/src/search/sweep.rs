use super::{cached_execute, execute, Backend, QueryCache, SearchError};
use crate::analysis::{ResultRow, ResultTable};
use crate::fragment::{sample, SizeSchedule};
use crate::smiles::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub seed: u64,
    /// Queries issued concurrently.
    pub max_in_flight: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            seed: 0,
            max_in_flight: 1,
        }
    }
}

/// Sample one fragment per schedule size from `smiles`, query each, and
/// tabulate `(fragment, symbols, size, log10 size)`.
///
/// Tokenizer and schedule errors abort the sweep. A failed query only
/// marks its own row.
pub fn sweep(
    smiles: &str,
    schedule: &SizeSchedule,
    options: SweepOptions,
    backend: &dyn Backend,
    cache: Option<&QueryCache>,
) -> Result<ResultTable, SearchError> {
    let tokens = tokenize(smiles)?;
    let fragments = sample(&tokens, schedule, options.seed)?;
    let queries: Vec<(String, usize)> = fragments
        .iter()
        .map(|f| (f.render().to_owned(), f.len()))
        .collect();

    let run = |query: &str| match cache {
        Some(cache) => cached_execute(cache, backend, query),
        None => execute(backend, query),
    };

    let mut rows = Vec::with_capacity(queries.len());
    for batch in queries.chunks(options.max_in_flight.max(1)) {
        let outcomes: Vec<_> = if batch.len() == 1 {
            vec![run(&batch[0].0)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = batch.iter().map(|(q, _)| scope.spawn(|| run(q))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("query thread panicked"))
                    .collect()
            })
        };
        for ((query, symbols), outcome) in batch.iter().zip(outcomes) {
            rows.push(match outcome {
                Ok(r) => ResultRow::new(query.clone(), *symbols, r.result_set_size),
                Err(e) => ResultRow::failed(query.clone(), *symbols, format!("{}: {e}", e.code())),
            });
        }
    }
    Ok(ResultTable { rows })
}
