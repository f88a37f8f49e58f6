use super::rational::BigQ;
use super::series::{Coeff, PowerSeries};

/// `z^mu * sum_k (log z)^k g_k(z)`, each `g_k` truncated at the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSeries<C = BigQ> {
    pub mu: BigQ,
    pub terms: Vec<PowerSeries<C>>,
}

impl<C: Coeff> LogSeries<C> {
    pub fn new(mu: BigQ, mut terms: Vec<PowerSeries<C>>) -> Self {
        let n = terms.iter().map(|t| t.order()).min().unwrap_or(0);
        for t in terms.iter_mut() {
            if t.order() > n {
                *t = t.truncate(n);
            }
        }
        while terms.len() > 1 && terms.last().is_some_and(|t| t.is_zero()) {
            terms.pop();
        }
        LogSeries { mu, terms }
    }

    pub fn order(&self) -> usize {
        self.terms.first().map_or(0, |t| t.order())
    }

    /// Highest power of log z with a nonzero coefficient series.
    pub fn log_degree(&self) -> usize {
        self.terms.iter().rposition(|t| !t.is_zero()).unwrap_or(0)
    }

    pub fn term(&self, k: usize) -> Option<&PowerSeries<C>> {
        self.terms.get(k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_zero())
    }
}
