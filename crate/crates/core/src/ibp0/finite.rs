use crate::error::{Error, Result};
use crate::scan::Carrier;
use crate::table::{check_index, check_size, Table};

use super::Residuated;

/// An algebra given by its operation tables over `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMtl {
    times: Table,
    imp: Table,
    meet: Table,
    join: Table,
    bot: usize,
    top: usize,
}

impl FiniteMtl {
    pub fn new(size: usize, times: Table, imp: Table, meet: Table, join: Table, bot: usize, top: usize) -> Result<Self> {
        check_size("size", size)?;
        for (field, table) in [("times", &times), ("impl", &imp), ("meet", &meet), ("join", &join)] {
            if table.size() != size {
                return Err(Error::structural(
                    field,
                    format!("table of size {} for carrier of size {size}", table.size()),
                ));
            }
        }
        check_index("bot", size, bot as i64)?;
        check_index("top", size, top as i64)?;
        Ok(FiniteMtl {
            times,
            imp,
            meet,
            join,
            bot,
            top,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_fns(
        size: usize,
        times: impl FnMut(usize, usize) -> usize,
        imp: impl FnMut(usize, usize) -> usize,
        meet: impl FnMut(usize, usize) -> usize,
        join: impl FnMut(usize, usize) -> usize,
        bot: usize,
        top: usize,
    ) -> Self {
        FiniteMtl::new(
            size,
            Table::from_fn(size, times),
            Table::from_fn(size, imp),
            Table::from_fn(size, meet),
            Table::from_fn(size, join),
            bot,
            top,
        )
        .expect("tables built from functions have consistent shape")
    }

    pub fn size(&self) -> usize {
        self.times.size()
    }

    pub fn bot_index(&self) -> usize {
        self.bot
    }

    pub fn top_index(&self) -> usize {
        self.top
    }

    pub fn tables(&self) -> [&Table; 4] {
        [&self.times, &self.imp, &self.meet, &self.join]
    }

    #[inline]
    pub fn times(&self, x: usize, y: usize) -> usize {
        self.times.get(x, y)
    }

    #[inline]
    pub fn implies(&self, x: usize, y: usize) -> usize {
        self.imp.get(x, y)
    }

    #[inline]
    pub fn meet_index(&self, x: usize, y: usize) -> usize {
        self.meet.get(x, y)
    }

    #[inline]
    pub fn join_index(&self, x: usize, y: usize) -> usize {
        self.join.get(x, y)
    }
}

impl Carrier for FiniteMtl {
    type Elem = usize;

    fn elements(&self, _bound: u32) -> Vec<usize> {
        (0..self.size()).collect()
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn element_count(&self, _bound: u32) -> usize {
        self.size()
    }
}

impl Residuated for FiniteMtl {
    fn bot(&self) -> usize {
        self.bot
    }

    fn top(&self) -> usize {
        self.top
    }

    fn mul(&self, x: &usize, y: &usize) -> usize {
        self.times(*x, *y)
    }

    fn imp(&self, x: &usize, y: &usize) -> usize {
        self.implies(*x, *y)
    }

    fn meet(&self, x: &usize, y: &usize) -> usize {
        self.meet_index(*x, *y)
    }

    fn join(&self, x: &usize, y: &usize) -> usize {
        self.join_index(*x, *y)
    }
}
