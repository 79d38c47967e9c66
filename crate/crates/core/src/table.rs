use crate::error::{Error, Result};

/// A square operation table over the carrier `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    size: usize,
    cells: Vec<u32>,
}

impl Table {
    /// Builds a table from rows, rejecting ragged rows and out-of-range entries.
    pub fn from_rows(field: &str, size: usize, rows: &[Vec<i64>]) -> Result<Self> {
        if rows.len() != size {
            return Err(Error::structural(
                field,
                format!("expected {size} rows, found {}", rows.len()),
            ));
        }
        let mut cells = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::structural(
                    format!("{field}[{i}]"),
                    format!("ragged row: expected {size} entries, found {}", row.len()),
                ));
            }
            for (j, &entry) in row.iter().enumerate() {
                cells.push(check_index(&format!("{field}[{i}][{j}]"), size, entry)?);
            }
        }
        Ok(Table { size, cells })
    }

    pub fn from_fn(size: usize, mut op: impl FnMut(usize, usize) -> usize) -> Self {
        let mut cells = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                let v = op(i, j);
                assert!(v < size, "table entry {v} out of range for size {size}");
                cells.push(v as u32);
            }
        }
        Table { size, cells }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.cells[x * self.size + y] as usize
    }

    pub fn set(&mut self, x: usize, y: usize, value: usize) {
        assert!(value < self.size);
        self.cells[x * self.size + y] = value as u32;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.cells
            .chunks(self.size.max(1))
            .take(self.size)
            .map(|row| row.iter().map(|&v| i64::from(v)).collect())
            .collect()
    }
}

pub(crate) fn check_index(field: &str, size: usize, value: i64) -> Result<u32> {
    if value < 0 || value as u64 >= size as u64 {
        return Err(Error::structural(
            field,
            format!("index {value} out of range for size {size}"),
        ));
    }
    Ok(value as u32)
}

pub(crate) fn check_size(field: &str, size: usize) -> Result<()> {
    if size == 0 {
        return Err(Error::structural(field, "carrier must be nonempty"));
    }
    if size > 4096 {
        return Err(Error::structural(field, format!("carrier of size {size} is too large")));
    }
    Ok(())
}
