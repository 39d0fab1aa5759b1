//! Acceptance suite: one PASS or FAIL line per criterion.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::{Arc, LazyLock};
use std::time::{Duration, Instant};

use concat_core::quiz::{check_forward, solve_inverse, Quiz, Verdict};
use concat_core::reader::parse_values;
use concat_core::tracer::record;
use concat_core::value::render_seq;
use concat_core::{Action, KernelOp, Machine, Value};
use itertools::Itertools;
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<(), String>;

static STDLIB: LazyLock<Machine> = LazyLock::new(Machine::with_stdlib);

const EXPECTED_BANNER: [&str; 3] = [
    "KERNEL   *  +  -  /  <  =  [  ]  and  cat  choice  count  drop  dup  empty?  get  i  id  last  lcut  ljoin  mod  \
     newstack  not  or  rcut  rolldown  rollup  stack  stack-size  swap  unstack",
    "LIBRARY   ->  any?  ddip  ddrop  dec  dip  drop4  duco  even?  factorial  factorial2  filter  first  fix  fold  \
     ifte  inc  map  map2  odd?  over  pack  pair  quote  range  rec-fold  rec-map  rec-while  remove  rjoin  rjoin-if  \
     run  rund  sifte  sim  square  sum  tdip  tdrop  times  while  y  zero?  |",
    "META/SYSTEM   .def  .depth  .language  .load  .quit  .src",
];

const FACTORIAL_SOURCE: &str = "\"factorial\"
[ [ dup zero? ]
  [ drop 1 ]
  [ dup 1 - factorial * ]
  ifte ]
.def";

fn resource(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/resources").join(rel)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eval_on(base: &Machine, src: &str) -> Result<Vec<Value>, String> {
    let mut m = base.clone();
    m.eval(src).map_err(|e| format!("{src}: {e}"))?;
    m.ensure_closed().map_err(|e| format!("{src}: {e}"))?;
    Ok(m.stack().to_vec())
}

fn eval(src: &str) -> Result<String, String> {
    eval_on(&STDLIB, src).map(|s| render_seq(&s))
}

fn expect(src: &str, want: &str) -> Check {
    let got = eval(src)?;
    ensure(got == want, || format!("{src} gave {got}, expected {want}"))
}

fn run_props<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Check {
    let config = Config { cases, max_global_rejects: 500_000, failure_persistence: None, ..Config::default() };
    TestRunner::new(config).run(&strategy, test).map_err(|e| e.to_string())
}

fn int_list(xs: &[i64]) -> String {
    if xs.is_empty() {
        "[ ]".to_string()
    } else {
        format!("[ {} ]", xs.iter().join(" "))
    }
}

fn fresh_session() -> Check {
    let mut child = Command::new(env!("CARGO_BIN_EXE_con-cat"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    child.stdin.take().unwrap().write_all(b"1 2 +\n").map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = text.lines().collect();
    ensure(out.status.success(), || format!("exit status {}", out.status))?;
    ensure(lines.len() == 8, || format!("unexpected session:\n{text}"))?;
    ensure(lines[0].starts_with("con-cat "), || format!("version line {:?}", lines[0]))?;
    for (got, want) in lines[1..4].iter().zip(EXPECTED_BANNER) {
        ensure(*got == want, || format!("banner line {got:?} != {want:?}"))?;
    }
    ensure(lines[4..] == ["", "empty stack", "", "0: 3"], || format!("stack lines {:?}", &lines[4..]))
}

fn forward_quiz() -> Check {
    expect("2 3 4 5 * + *", "46")?;
    let q = Quiz::parse(&std::fs::read_to_string(resource("quizzes/forty-six.quiz")).unwrap())
        .map_err(|e| e.to_string())?;
    let verdict = check_forward(&STDLIB, &q, &parse_values("46").unwrap()).map_err(|e| e.to_string())?;
    ensure(verdict == Verdict::Correct, || verdict.sentence())
}

fn brute_force(stack: &str, target: &str, alphabet: &[&str], len: usize) -> BTreeSet<String> {
    let target = parse_values(target).unwrap();
    std::iter::repeat_n(alphabet.iter(), len)
        .multi_cartesian_product()
        .map(|tokens| tokens.iter().join(" "))
        .filter(|p| eval_on(&STDLIB, &format!("{stack} {p}")).is_ok_and(|s| s == target))
        .collect()
}

fn inverse_quiz() -> Check {
    let all: Vec<String> = std::iter::repeat_n(["+", "*"].iter(), 2)
        .multi_cartesian_product()
        .map(|t| t.iter().join(" "))
        .collect();
    ensure(all.len() == 4, || "expected four candidates".into())?;
    for (target, expected) in [("14", vec!["+ *", "* +"]), ("9", vec!["+ +"]), ("24", vec!["* *"])] {
        let q = Quiz::parse(&format!(
            "kind: inverse\nstack: 2 3 4\ntarget: {target}\nalphabet: + *\nmax-len: 2\n"
        ))
        .map_err(|e| e.to_string())?;
        let found: Vec<String> = solve_inverse(&STDLIB, &q)
            .map_err(|e| e.to_string())?
            .lines();
        ensure(found == expected, || format!("target {target}: {found:?}"))?;
        let oracle = brute_force("2 3 4", target, &["+", "*"], 2);
        let found: BTreeSet<String> = found.into_iter().collect();
        ensure(found == oracle, || format!("target {target}: brute force gives {oracle:?}"))?;
    }
    Ok(())
}

fn dip_puzzle() -> Check {
    expect("2 3 4 [ + ] swap rjoin i", "5 4")?;
    let mut m = STDLIB.clone();
    m.eval("\"dip\" [ swap rjoin i ] .def").map_err(|e| e.to_string())?;
    let got = render_seq(&eval_on(&m, "2 3 4 [ + ] dip")?);
    ensure(got == "5 4", || format!("redefined dip gave {got}"))
}

fn quoting() -> Check {
    let t = record(&STDLIB, "[ 1 2 + ]", &[], None).map_err(|e| e.to_string())?;
    let arithmetic = t.steps.iter().any(|s| {
        matches!(s.action, Some(Action::Kernel(KernelOp::Add | KernelOp::Sub | KernelOp::Mul | KernelOp::Div | KernelOp::Mod)))
    });
    ensure(!arithmetic, || "the trace contains an arithmetic step".into())?;
    let stack = eval_on(&STDLIB, "[ 1 2 + ]")?;
    ensure(
        matches!(&stack[..], [Value::List(items)] if items.len() == 3),
        || format!("stack {}", render_seq(&stack)),
    )?;
    expect("7 [ ] ljoin", "[ 7 ]")
}

fn factorial() -> Check {
    let mut m = Machine::with_stdlib();
    m.eval(FACTORIAL_SOURCE).map_err(|e| e.to_string())?;
    let product = |n: u32| -> BigInt { (1..=n).map(BigInt::from).product() };
    for (n, want) in [(0, "1"), (5, "120"), (20, "2432902008176640000")] {
        let got = render_seq(&eval_on(&m, &format!("{n} factorial"))?);
        ensure(got == want, || format!("{n} factorial gave {got}"))?;
        let oracle = eval(&format!("{n} factorial2"))?;
        ensure(oracle == want && product(n).to_string() == want, || {
            format!("{n} factorial2 gave {oracle}")
        })?;
    }
    let anonymous = "[ swap dup zero? [ ddrop 1 ] [ dup dec rolldown y * ] choice i ] y";
    for n in 0..=10 {
        let named = render_seq(&eval_on(&m, &format!("{n} factorial"))?);
        let anon = eval(&format!("{n} {anonymous}"))?;
        ensure(named == anon && named == product(n).to_string(), || {
            format!("{n}: named {named}, anonymous {anon}")
        })?;
    }
    Ok(())
}

fn higher_order() -> Check {
    expect("[ 1 2 3 ] [ dup * ] map", "[ 1 4 9 ]")?;
    expect("[ 1 2 3 ] 0 [ + ] fold", "6")?;
    run_props(200, prop::collection::vec(-9i64..=9, 0..=8), |xs| {
        let list = int_list(&xs);
        let squares = int_list(&xs.iter().map(|x| x * x).collect::<Vec<_>>());
        let total = xs.iter().sum::<i64>().to_string();
        for (src, want) in [
            (format!("{list} [ dup * ] map"), &squares),
            (format!("{list} [ dup * ] rec-map"), &squares),
            (format!("{list} 0 [ + ] fold"), &total),
            (format!("{list} 0 [ + ] rec-fold"), &total),
        ] {
            let got = eval(&src).map_err(TestCaseError::fail)?;
            prop_assert_eq!(&got, want, "{}", src);
        }
        Ok(())
    })
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if a % b != 0 && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn scalar() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<i64>().prop_map(|n| Value::Int(n.into())),
        any::<bool>().prop_map(Value::Bool),
        "[a-z]{0,4}".prop_map(Value::Str),
    ]
}

fn value() -> impl Strategy<Value = Value> {
    scalar().prop_recursive(2, 12, 4, |inner| {
        prop::collection::vec(inner, 0..4).prop_map(|v| Value::List(Arc::new(v)))
    })
}

fn stack_identity(program: &'static str, min: usize) -> Check {
    run_props(1000, prop::collection::vec(value(), min..min + 4), move |values| {
        let mut m = STDLIB.clone();
        m.set_stack(values.clone());
        m.eval(program).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(m.stack(), &values[..], "{}", program);
        Ok(())
    })
}

fn kernel_algebra() -> Check {
    let nonzero = any::<i64>().prop_filter("nonzero", |b| *b != 0);
    run_props(1000, (any::<i64>(), nonzero), |(a, b)| {
        let q = eval(&format!("{a} {b} /")).map_err(TestCaseError::fail)?;
        prop_assert_eq!(q, floor_div(a.into(), b.into()).to_string());
        let back = eval(&format!("{a} {b} / {b} * {a} {b} mod +")).map_err(TestCaseError::fail)?;
        prop_assert_eq!(back, a.to_string());
        Ok(())
    })?;
    run_props(1000, prop::collection::vec(any::<i32>(), 1..10), |xs| {
        let xs: Vec<i64> = xs.into_iter().map(i64::from).collect();
        let list = int_list(&xs);
        for program in ["lcut ljoin", "rcut rjoin"] {
            let got = eval(&format!("{list} {program}")).map_err(TestCaseError::fail)?;
            prop_assert_eq!(&got, &list, "{}", program);
        }
        Ok(())
    })?;
    stack_identity("stack unstack", 0)?;
    stack_identity("swap swap", 2)?;
    stack_identity("rollup rolldown", 3)
}

const KERNEL_POOL: &[&str] = &[
    "dup", "drop", "swap", "rollup", "rolldown", "+", "-", "*", "/", "mod", "<", "=", "and", "or",
    "not", "cat", "ljoin", "lcut", "rcut", "count", "empty?", "i", "stack", "unstack", "choice",
];

fn program() -> impl Strategy<Value = String> {
    let token = prop_oneof![
        3 => (-9i64..10).prop_map(|n| n.to_string()),
        1 => any::<bool>().prop_map(|b| b.to_string()),
        1 => prop::collection::vec(-9i64..10, 0..3).prop_map(|xs| int_list(&xs)),
        6 => prop::sample::select(KERNEL_POOL).prop_map(String::from),
    ];
    prop::collection::vec(token, 0..8).prop_map(|t| t.join(" "))
}

fn concatenativity() -> Check {
    let kernel = Machine::new();
    let seed = prop::collection::vec(-9i64..10, 0..5).prop_map(|s| s.iter().join(" "));
    run_props(500, (seed, program(), program()), |(seed, p, q)| {
        let p = format!("{seed} {p}");
        let Ok(after_p) = eval_on(&kernel, &p) else { return Err(TestCaseError::reject("p fails")) };
        let mut m = kernel.clone();
        m.set_stack(after_p);
        if m.eval(&q).is_err() || m.ensure_closed().is_err() {
            return Err(TestCaseError::reject("q fails"));
        }
        let joined = eval_on(&kernel, &format!("{p} {q}")).map_err(TestCaseError::fail)?;
        prop_assert_eq!(m.stack(), &joined[..]);
        Ok(())
    })
}

fn trace_format() -> Check {
    let golden = std::fs::read_to_string(resource("golden/one-two-plus.trace.txt")).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut texts = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}.trace.txt"));
        let typ = dir.path().join(format!("run{run}.trace.typ"));
        let status = Command::new(env!("CARGO_BIN_EXE_con-cat"))
            .args(["trace", "--eval", "1 2 +", "--out"])
            .arg(&out)
            .arg("--typst")
            .arg(&typ)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("trace exited with {status}"))?;
        let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
        let typst = std::fs::read_to_string(&typ).map_err(|e| e.to_string())?;
        let cells: Vec<String> = typst
            .lines()
            .filter_map(|l| l.trim().strip_prefix("raw(\""))
            .map(|l| {
                let (stack, input) = l.split_once("\"), raw(\"").unwrap();
                format!("{stack} | {}", input.strip_suffix("\"),").unwrap())
            })
            .collect();
        let lines: Vec<String> = text.lines().map(String::from).collect();
        ensure(cells == lines, || format!("typst cells {cells:?} != text lines {lines:?}"))?;
        texts.push(text);
    }
    ensure(texts[0] == texts[1], || "two runs differ".into())?;
    ensure(texts[0] == golden, || format!("trace differs from golden file:\n{}", texts[0]))
}

const JARGON: &[&str] = &[
    "Value", "Vec", "Int", "BigInt", "Option", "None", "Some", "Err", "Ok(", "ErrorKind", "EvalError",
    "panic", "unwrap", "frame", "underflow", "overflow", "exception", "null", "nil", "pop", "Term",
    "Item", "struct", "enum", "::", "index out of", "dispatch", "opcode",
];

fn error_messages() -> Check {
    let goldens = [
        ("dup", "Cannot copy the top of an empty stack."),
        ("drop", "Cannot discard the top of an empty stack."),
        ("frobnicate", "The token 'frobnicate' has no meaning yet."),
        ("]", "There is no open list to close."),
        ("1 0 /", "Cannot divide by zero."),
    ];
    for (program, want) in goldens {
        let err = STDLIB.clone().eval(program).err().ok_or_else(|| format!("{program} did not fail"))?;
        let got = err.kind.to_string();
        ensure(got == want, || format!("{program}: {got:?}"))?;
        ensure(got.starts_with(char::is_uppercase) && got.ends_with('.'), || {
            format!("{got:?} is not a complete sentence")
        })?;
        let lowered = got.to_lowercase();
        for word in JARGON {
            let hit = if word.chars().next().unwrap().is_uppercase() {
                got.contains(word)
            } else {
                lowered.contains(word)
            };
            ensure(!hit, || format!("{got:?} uses {word:?}"))?;
        }
    }
    Ok(())
}

fn project_euler() -> Check {
    let oracle: u64 = (1..1000u64).filter(|n| n % 3 == 0 || n % 5 == 0).sum();
    let out = Command::new(env!("CARGO_BIN_EXE_con-cat"))
        .arg("run")
        .arg(resource("programs/euler1.concat"))
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    ensure(text == format!("0: {oracle}\n"), || format!("run printed {text:?}"))
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Check,
}

const fn secs(n: u64) -> Option<Duration> {
    Some(Duration::from_secs(n))
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "fresh session banner and 1 2 +", limit: secs(1), check: fresh_session },
    Criterion { id: 2, name: "forward quiz yields 46", limit: secs(1), check: forward_quiz },
    Criterion { id: 3, name: "inverse quiz solutions", limit: secs(1), check: inverse_quiz },
    Criterion { id: 4, name: "dip puzzle", limit: secs(1), check: dip_puzzle },
    Criterion { id: 5, name: "quotation defers evaluation", limit: None, check: quoting },
    Criterion { id: 6, name: "factorial, named and anonymous", limit: secs(1), check: factorial },
    Criterion { id: 7, name: "map and fold with recursive variants", limit: secs(5), check: higher_order },
    Criterion { id: 8, name: "kernel algebra properties", limit: secs(5), check: kernel_algebra },
    Criterion { id: 9, name: "concatenativity", limit: secs(10), check: concatenativity },
    Criterion { id: 10, name: "trace determinism and format", limit: None, check: trace_format },
    Criterion { id: 11, name: "error sentences", limit: None, check: error_messages },
    Criterion { id: 12, name: "sum of multiples of 3 or 5 below 1000", limit: secs(5), check: project_euler },
];

fn main() {
    LazyLock::force(&STDLIB);
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.check))
            .unwrap_or_else(|_| Err("the check panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|()| match c.limit {
            Some(limit) if elapsed > limit => Err(format!("took longer than {limit:?}")),
            _ => Ok(()),
        });
        let ms = elapsed.as_millis();
        match result {
            Ok(()) => println!("PASS {:>2} {} ({ms} ms)", c.id, c.name),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {} ({ms} ms): {reason}", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
