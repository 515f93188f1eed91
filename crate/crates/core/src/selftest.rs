//! Built-in golden vectors, runnable from the command line.

use crate::cipher::{qf_permute, QF_TABLE};
use crate::sbox::ZIGZAG_8X8;
use crate::trigram::{obfuscate_bits, DigitKey, Hexagram, Trigram};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn compare<T: std::fmt::Debug + PartialEq>(name: &'static str, expected: T, actual: T) -> Check {
    let passed = expected == actual;
    let detail = if passed {
        format!("{actual:?}")
    } else {
        format!("expected {expected:?}, got {actual:?}")
    };
    Check { name, passed, detail }
}

fn hex6(bits: &str) -> Hexagram {
    Hexagram::new(u8::from_str_radix(bits, 2).expect("binary literal"))
}

/// Runs every golden vector and returns one entry per check.
pub fn run() -> Vec<Check> {
    let h = hex6("101100");
    let mut out = vec![
        compare("hexagram.hu(101100)", "011110".to_owned(), h.hu().to_string()),
        compare("hexagram.zong(101100)", "001101".to_owned(), h.zong().to_string()),
        compare("hexagram.cuo(101100)", "010011".to_owned(), h.cuo().to_string()),
        compare("hexagram.zy(101101)", "001100".to_owned(), hex6("101101").zy_encrypt().to_string()),
    ];

    let expected_rows = ["Qian", "Xun", "Li", "Gen", "Dui", "Kan", "Zhen", "Kun"];
    let rows: Vec<&str> = (0..8).map(|v| Trigram::obfuscation_of(v).name()).collect();
    out.push(compare("trigram.obfuscation_table", expected_rows.to_vec(), rows));

    let key = DigitKey::parse("5").expect("valid digit");
    let bits = obfuscate_bits(&[true, true, false], &key).expect("3 bits");
    // 110 xor 101 = 011, complemented to 100.
    out.push(compare("trigram.obfuscate(110, key 5)", vec![true, false, false], bits));

    out.push(compare("qf.table", [5u8, 2, 10, 6, 7, 4, 0, 1, 3, 8, 9, 11], QF_TABLE));
    let mut seen = vec![false; 4096];
    for w in 0..4096u16 {
        seen[qf_permute(w) as usize] = true;
    }
    out.push(compare("qf.bijective", true, seen.iter().all(|&s| s)));

    out.push(compare("zigzag.prefix", vec![0usize, 1, 8, 16, 9, 2, 3, 10], ZIGZAG_8X8[..8].to_vec()));
    out
}
