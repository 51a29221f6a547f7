//! Stern–Brocot ({A,B}) and Farey ({L,R}) codings of Stern–Brocot intervals.

use std::fmt;
use std::str::FromStr;

use super::cf::CFWord;
use super::rational::Fraction;
use super::tree::SBInterval;
use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// Letters `A = α(x) = x/(1+x)` and `B = β(x) = 1/(2−x)`.
    SternBrocot,
    /// Letters `L = u₀(x) = x/(1+x)` and `R = u₁(x) = 1/(1+x)`.
    Farey,
}

impl Alphabet {
    fn letters(self) -> [char; 2] {
        match self {
            Alphabet::SternBrocot => ['A', 'B'],
            Alphabet::Farey => ['L', 'R'],
        }
    }
}

/// A non-empty word over one of the two alphabets. `false` is the first
/// letter (`A` or `L`), `true` the second (`B` or `R`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryCode {
    alphabet: Alphabet,
    letters: Vec<bool>,
}

impl BinaryCode {
    pub fn new(alphabet: Alphabet, letters: Vec<bool>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyCode);
        }
        Ok(Self { alphabet, letters })
    }

    /// Code of length `len` whose letters are the low `len` bits of `bits`,
    /// most significant first.
    pub fn from_bits(alphabet: Alphabet, bits: u64, len: u32) -> Result<Self> {
        let letters = (0..len).rev().map(|i| (bits >> i) & 1 == 1).collect();
        Self::new(alphabet, letters)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn letters(&self) -> &[bool] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Lengths of the maximal runs of equal letters.
    fn runs(&self) -> Vec<u64> {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == self.letters[i] {
                j += 1;
            }
            runs.push((j - i) as u64);
            i = j;
        }
        runs
    }
}

impl fmt::Display for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y] = self.alphabet.letters();
        for &b in &self.letters {
            write!(f, "{}", if b { y } else { x })?;
        }
        Ok(())
    }
}

impl FromStr for BinaryCode {
    type Err = Error;

    /// The alphabet is inferred from the letters.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::EmptyCode);
        }
        let alphabet = if s.chars().all(|c| c == 'A' || c == 'B') {
            Alphabet::SternBrocot
        } else if s.chars().all(|c| c == 'L' || c == 'R') {
            Alphabet::Farey
        } else {
            return Err(domain(format!(
                "code {s:?} must use only A/B or only L/R"
            )));
        };
        let second = alphabet.letters()[1];
        Self::new(alphabet, s.chars().map(|c| c == second).collect())
    }
}

/// Image of a point under one letter.
fn apply_letter(alphabet: Alphabet, second: bool, x: Fraction) -> Result<Fraction> {
    let (p, q) = (x.num, x.den);
    let sum = p.checked_add(q).ok_or(Error::Overflow)?;
    Ok(match (alphabet, second) {
        (_, false) => Fraction { num: p, den: sum },
        (Alphabet::Farey, true) => Fraction { num: q, den: sum },
        (Alphabet::SternBrocot, true) => Fraction {
            num: q,
            den: (2 * q as u128 - p as u128).try_into().map_err(|_| Error::Overflow)?,
        },
    })
}

/// `w₁ ∘ … ∘ w_k ([0, 1])` with endpoints sorted.
pub fn apply_code(code: &BinaryCode) -> Result<SBInterval> {
    let mut lo = Fraction::ZERO;
    let mut hi = Fraction::ONE;
    for &letter in code.letters.iter().rev() {
        lo = apply_letter(code.alphabet, letter, lo)?;
        hi = apply_letter(code.alphabet, letter, hi)?;
    }
    SBInterval::from_endpoints(lo, hi, code.len() as u32)
}

/// Translates a code naming a full cylinder into its digit word.
pub fn code_to_cylinder(code: &BinaryCode) -> Result<CFWord> {
    let untranslatable = || Error::Untranslatable(code.to_string());
    match code.alphabet {
        Alphabet::Farey => {
            if !*code.letters.last().unwrap() {
                return Err(untranslatable());
            }
            let mut digits = Vec::new();
            let mut run = 1u64;
            for &b in &code.letters {
                if b {
                    digits.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            CFWord::new(digits)
        }
        Alphabet::SternBrocot => {
            let runs = code.runs();
            if *runs.last().unwrap() != 1 {
                return Err(untranslatable());
            }
            let body = &runs[..runs.len() - 1];
            let first_b = code.letters[0];
            let digits = match (body.is_empty(), first_b) {
                (true, true) => vec![1],
                (true, false) => return Err(untranslatable()),
                (false, false) => {
                    let mut d = body.to_vec();
                    d[0] += 1;
                    d
                }
                (false, true) => {
                    let mut d = vec![1];
                    d.extend_from_slice(body);
                    d
                }
            };
            CFWord::new(digits)
        }
    }
}

/// Inverse dictionary: the Farey code `L^{a₁−1}R ⋯ L^{a_k−1}R`.
pub fn cylinder_to_farey(word: &CFWord) -> Result<BinaryCode> {
    let mut letters = Vec::new();
    for &a in word.digits() {
        letters.extend(std::iter::repeat_n(false, (a - 1) as usize));
        letters.push(true);
    }
    BinaryCode::new(Alphabet::Farey, letters)
}

/// Inverse dictionary into the Stern–Brocot alphabet.
pub fn cylinder_to_sb(word: &CFWord) -> Result<BinaryCode> {
    let d = word.digits();
    // Run lengths and the letter of the first run.
    let (runs, first_b): (Vec<u64>, bool) = if d[0] == 1 {
        (d[1..].to_vec(), true)
    } else {
        let mut r = d.to_vec();
        r[0] -= 1;
        (r, false)
    };
    let mut letters = Vec::new();
    let mut letter = first_b;
    for &r in &runs {
        letters.extend(std::iter::repeat_n(letter, r as usize));
        letter = !letter;
    }
    letters.push(letter);
    BinaryCode::new(Alphabet::SternBrocot, letters)
}

/// The code of length `interval.level` naming `interval` in `alphabet`.
pub fn code_of(interval: &SBInterval, alphabet: Alphabet) -> Result<BinaryCode> {
    if interval.level == 0 {
        return Err(Error::EmptyCode);
    }
    let mut x = interval.mediant()?;
    let mut letters = Vec::with_capacity(interval.level as usize);
    for _ in 0..interval.level {
        // Interior points never land on 1/2 before the last letter.
        let second = 2 * x.num as u128 > x.den as u128;
        letters.push(second);
        x = match (alphabet, second) {
            (_, false) => Fraction {
                num: x.num,
                den: x.den - x.num,
            },
            (Alphabet::Farey, true) => Fraction {
                num: x.den - x.num,
                den: x.num,
            },
            (Alphabet::SternBrocot, true) => Fraction {
                num: 2 * x.num - x.den,
                den: x.num,
            },
        };
    }
    BinaryCode::new(alphabet, letters)
}
