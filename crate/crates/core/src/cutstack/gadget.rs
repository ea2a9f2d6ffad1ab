use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};

use super::interval::{normalize, Level, RationalInterval};
use super::label::{self, LabelDistribution, LabelGadget};
use crate::error::{Error, Result};
use crate::processes::Symbol;
use crate::rational::{format, int, one, zero, Rational};

/// A tower of equal-width levels, bottom first, one symbol per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    levels: Vec<Level>,
    label: Vec<Symbol>,
}

impl Column {
    pub fn new(levels: Vec<Level>, label: Vec<Symbol>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidGadget("column with no levels".into()));
        }
        if levels.len() != label.len() {
            return Err(Error::InvalidGadget(format!(
                "column has {} levels but label length {}",
                levels.len(),
                label.len()
            )));
        }
        let w = levels[0].width();
        if let Some(l) = levels.iter().find(|l| l.width() != w) {
            return Err(Error::WidthMismatch(format!(
                "level widths {} and {} differ",
                format(w),
                format(l.width())
            )));
        }
        normalize(levels.iter().flat_map(|l| l.pieces().iter().cloned()).collect())?;
        Ok(Self { levels, label })
    }

    /// Column whose levels are single intervals.
    pub fn from_intervals(levels: Vec<RationalInterval>, label: Vec<Symbol>) -> Result<Self> {
        Self::new(levels.into_iter().map(Level::interval).collect(), label)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn label(&self) -> &[Symbol] {
        &self.label
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn width(&self) -> &Rational {
        self.levels[0].width()
    }

    pub fn measure(&self) -> Rational {
        self.width() * int(self.height() as u64)
    }

    pub fn base_start(&self) -> &Rational {
        self.levels[0].start()
    }

    /// Sorted, coalesced union of all levels.
    pub fn support(&self) -> Vec<RationalInterval> {
        normalize(self.levels.iter().flat_map(|l| l.pieces().iter().cloned()).collect())
            .expect("column levels are disjoint")
    }

    /// Cuts vertically into subcolumns of width `fractions[i]·w(C)`, taken
    /// left to right through every level.
    pub fn cut(&self, fractions: &[Rational]) -> Vec<Column> {
        let w = self.width().clone();
        let mut offset = zero();
        let mut out = Vec::with_capacity(fractions.len());
        for f in fractions {
            let len = &w * f;
            out.push(Column {
                levels: self.levels.iter().map(|l| l.slice(&offset, &len)).collect(),
                label: self.label.clone(),
            });
            offset += len;
        }
        out
    }

    pub fn cut_evenly(&self, m: usize) -> Vec<Column> {
        let share = Rational::new(One::one(), (m as i64).into());
        self.cut(&vec![share; m])
    }
}

/// Puts `upper` directly on top of `lower`.
pub fn stack(lower: &Column, upper: &Column) -> Result<Column> {
    if lower.width() != upper.width() {
        return Err(Error::WidthMismatch(format!(
            "cannot stack width {} onto width {}",
            format(upper.width()),
            format(lower.width())
        )));
    }
    let mut levels = lower.levels.clone();
    levels.extend(upper.levels.iter().cloned());
    let mut label = lower.label.clone();
    label.extend_from_slice(&upper.label);
    Ok(Column { levels, label })
}

/// Columns with pairwise disjoint supports, ordered by base start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    columns: Vec<Column>,
}

impl Gadget {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidGadget("gadget with no columns".into()));
        }
        normalize(columns.iter().flat_map(|c| c.support()).collect())?;
        Ok(Self::canonical(columns))
    }

    fn canonical(mut columns: Vec<Column>) -> Self {
        columns.sort_by(|a, b| a.base_start().cmp(b.base_start()));
        Self { columns }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn width(&self) -> Rational {
        self.columns.iter().fold(zero(), |a, c| a + c.width())
    }

    pub fn measure(&self) -> Rational {
        self.columns.iter().fold(zero(), |a, c| a + c.measure())
    }

    /// Measure of the union of top levels, which equals the width.
    pub fn top_measure(&self) -> Rational {
        self.width()
    }

    pub fn width_distribution(&self) -> Vec<Rational> {
        let w = self.width();
        self.columns.iter().map(|c| c.width() / &w).collect()
    }

    pub fn measure_distribution(&self) -> Vec<Rational> {
        let m = self.measure();
        self.columns.iter().map(|c| c.measure() / &m).collect()
    }

    pub fn uniform_height(&self) -> Option<usize> {
        let h = self.columns[0].height();
        self.columns.iter().all(|c| c.height() == h).then_some(h)
    }

    pub fn min_height(&self) -> usize {
        self.columns.iter().map(Column::height).min().unwrap_or(0)
    }

    pub fn support(&self) -> Vec<RationalInterval> {
        normalize(self.columns.iter().flat_map(|c| c.support()).collect())
            .expect("gadget supports are disjoint")
    }

    /// Label measures pooled over same-labeled columns.
    pub fn label_distribution(&self) -> LabelDistribution {
        let mut out = LabelDistribution::new();
        for c in &self.columns {
            *out.entry(c.label.clone()).or_insert_with(zero) += c.measure();
        }
        out
    }

    pub fn to_label_gadget(&self) -> Result<LabelGadget> {
        let h = self.uniform_height().ok_or(Error::NonUniformHeight)?;
        LabelGadget::new(h, self.label_distribution())
    }
}

fn check_distribution(pi: &[Rational]) -> Result<()> {
    if pi.is_empty() || pi.iter().any(|p| !p.is_positive()) {
        return Err(Error::InvalidDistribution(
            "cut proportions must be positive".into(),
        ));
    }
    let s = pi.iter().fold(zero(), |a, p| a + p);
    if s != one() {
        return Err(Error::InvalidDistribution(format!(
            "cut proportions sum to {}",
            format(&s)
        )));
    }
    Ok(())
}

fn check_disjoint(a: &[RationalInterval], b: &[RationalInterval]) -> Result<()> {
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    normalize(all).map(|_| ())
}

/// Cuts every column of `g` in the proportions `pi`; copy `i` collects the
/// `i`-th subcolumn of each.
pub fn cut_copies(g: &Gadget, pi: &[Rational]) -> Result<Vec<Gadget>> {
    check_distribution(pi)?;
    let mut copies: Vec<Vec<Column>> = vec![Vec::with_capacity(g.len()); pi.len()];
    for c in &g.columns {
        for (i, sub) in c.cut(pi).into_iter().enumerate() {
            copies[i].push(sub);
        }
    }
    Ok(copies.into_iter().map(Gadget::canonical).collect())
}

/// Independent cutting and stacking `S ∗ S'`: column `C_i` is cut in the
/// proportions of `w(S')`, each `C'_j` in the proportions of `w(S)`, and the
/// `(i, j)` piece of `C'_j` goes on top of the `(i, j)` piece of `C_i`.
pub fn independent_cut_stack(s: &Gadget, s2: &Gadget) -> Result<Gadget> {
    let w = s.width();
    if w != s2.width() {
        return Err(Error::WidthMismatch(format!(
            "gadget widths {} and {} differ",
            format(&w),
            format(&s2.width())
        )));
    }
    check_disjoint(&s.support(), &s2.support())?;
    let ws = s.width_distribution();
    let ws2 = s2.width_distribution();
    let lower: Vec<Vec<Column>> = s.columns.iter().map(|c| c.cut(&ws2)).collect();
    let mut upper: Vec<Vec<Column>> = s2.columns.iter().map(|c| c.cut(&ws)).collect();
    let mut out = Vec::with_capacity(ws.len() * ws2.len());
    for (i, row) in lower.into_iter().enumerate() {
        for (j, piece) in row.into_iter().enumerate() {
            let top = std::mem::replace(
                &mut upper[j][i],
                Column { levels: Vec::new(), label: Vec::new() },
            );
            let mut levels = piece.levels;
            levels.extend(top.levels);
            let mut label = piece.label;
            label.extend(top.label);
            out.push(Column { levels, label });
        }
    }
    Ok(Gadget::canonical(out))
}

/// `S^⟨m⟩`: `m` identical copies combined by left-folded ICS.
pub fn m_fold_ics(s: &Gadget, m: usize) -> Gadget {
    assert!(m >= 1, "fold count must be positive");
    if m == 1 {
        return s.clone();
    }
    let share = Rational::new(One::one(), (m as i64).into());
    let copies = cut_copies(s, &vec![share; m]).expect("uniform proportions");
    let mut it = copies.into_iter();
    let mut acc = it.next().unwrap();
    for c in it {
        acc = independent_cut_stack(&acc, &c).expect("copies share width and are disjoint");
    }
    acc
}

/// `⟨C⟩_m`: `m` even slices of `c` stacked into one column.
pub fn self_stack(c: &Column, m: usize) -> Column {
    assert!(m >= 1, "fold count must be positive");
    let mut slices = c.cut_evenly(m).into_iter();
    let mut acc = slices.next().unwrap();
    for s in slices {
        acc.levels.extend(s.levels);
        acc.label.extend(s.label);
    }
    acc
}

/// `{⟨S_L⟩_m, S_R^⟨m⟩}`.
pub fn fractional_ics(left: &Column, right: &Gadget, m: usize) -> Result<Gadget> {
    check_disjoint(&left.support(), &right.support())?;
    let mut cols = m_fold_ics(right, m).columns;
    cols.push(self_stack(left, m));
    Ok(Gadget::canonical(cols))
}

/// Merges columns sharing a label (and hence a height) into one column whose
/// levels are the unions of theirs.
pub fn merge_gadget(g: &Gadget) -> Gadget {
    let mut order: Vec<&[Symbol]> = Vec::new();
    let mut groups: HashMap<&[Symbol], Vec<&Column>> = HashMap::new();
    for c in &g.columns {
        let e = groups.entry(c.label()).or_default();
        if e.is_empty() {
            order.push(c.label());
        }
        e.push(c);
    }
    let cols = order
        .into_iter()
        .map(|lab| {
            let members = &groups[lab];
            if members.len() == 1 {
                return members[0].clone();
            }
            let levels = (0..members[0].height())
                .map(|i| {
                    let ls: Vec<&Level> = members.iter().map(|c| &c.levels[i]).collect();
                    Level::union(&ls).expect("gadget supports are disjoint")
                })
                .collect();
            Column { levels, label: lab.to_vec() }
        })
        .collect();
    Gadget::canonical(cols)
}

/// `−(1/h) Σ λ_S(a) log λ_S(a)` over pooled labels.
pub fn normalized_shannon_entropy(g: &Gadget, base: f64) -> Result<f64> {
    g.to_label_gadget()?.normalized_shannon_entropy(base)
}

/// `Σ_C Σ_D |λ(C∩D) − λ(C)λ(D)|`, exact.
pub fn epsilon_independence_exact(s: &Gadget, s2: &Gadget) -> Rational {
    let tag = |g: &Gadget| {
        let mut v: Vec<(RationalInterval, usize)> = g
            .columns
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.support().into_iter().map(move |p| (p, i)))
            .collect();
        v.sort_by(|a, b| a.0.start().cmp(b.0.start()));
        v
    };
    let a = tag(s);
    let b = tag(s2);
    let mut overlap: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let w = a[i].0.intersection_width(&b[j].0);
        if !w.is_zero() {
            *overlap.entry((a[i].1, b[j].1)).or_insert_with(zero) += w;
        }
        if a[i].0.end() <= b[j].0.end() {
            i += 1;
        } else {
            j += 1;
        }
    }
    let ms: Vec<Rational> = s.columns.iter().map(Column::measure).collect();
    let ms2: Vec<Rational> = s2.columns.iter().map(Column::measure).collect();
    let sum1 = ms.iter().fold(zero(), |x, y| x + y);
    let sum2 = ms2.iter().fold(zero(), |x, y| x + y);
    // Pairs without overlap contribute λ(C)λ(D); start from the full product
    // and correct the overlapping pairs.
    let mut total = sum1 * sum2;
    for ((c, d), ov) in overlap {
        let prod = &ms[c] * &ms2[d];
        total += (ov - &prod).abs() - prod;
    }
    total
}

pub fn epsilon_independence(s: &Gadget, s2: &Gadget) -> f64 {
    crate::rational::to_f64(&epsilon_independence_exact(s, s2))
}

/// Fraction of the `h − k + 1` windows of `ℓ(C)` equal to `a`.
pub fn block_frequency(c: &Column, a: &[Symbol]) -> Result<Rational> {
    label::window_frequency(c.label(), a)
}

/// `Σ_C p_k(a|C) λ(C)` for every length-`k` block that occurs.
pub fn gadget_block_distribution(g: &Gadget, k: usize) -> Result<LabelDistribution> {
    let h = g.min_height();
    if k == 0 || k > h {
        return Err(Error::BlockTooLong { k, height: h });
    }
    let mut out = LabelDistribution::new();
    for c in &g.columns {
        label::add_windows(&mut out, c.label(), &c.measure(), k);
    }
    Ok(out)
}

/// Block probability `ν(a)` of the concatenated-block process given by `g`,
/// for `|a| ≤ h`.
pub fn concatenated_block_distribution(g: &Gadget, a: &[Symbol]) -> Result<Rational> {
    g.to_label_gadget()?.concatenated_block_probability(a)
}
