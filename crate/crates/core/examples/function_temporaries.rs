//! Elementwise functions and products of compound operands need a
//! temporary; plain names are read directly.

use kernelplan::{eval_stmt, exec_plan, lower, parse_statement, Matrix, Workspace};

fn main() {
    let n = 6;
    let mut ws = Workspace::new();
    for (k, v) in ["X", "A", "B", "C"].iter().enumerate() {
        let data = (0..n).map(|i| 0.1 * (i + k) as f64).collect();
        ws.bind_vector(*v, data).unwrap();
    }
    ws.bind_matrix("M", Matrix::identity(n)).unwrap();
    ws.bind_scalar("c", -1.5).unwrap();

    for text in [
        "X = sin(A)",
        "X = sin(A + B + C)",
        "X = A + cos(c*B - C)",
        "X = M*(A + B) + log(C + A + B)",
    ] {
        let stmt = parse_statement(text, &ws).unwrap();
        let plan = lower(&stmt, &ws).unwrap();
        println!("{text}  (temporaries: {})\n{plan}", plan.temp_count());

        let mut by_plan = ws.clone();
        exec_plan(&plan, &mut by_plan).unwrap();
        let mut by_loop = ws.clone();
        eval_stmt(&stmt, &mut by_loop).unwrap();
        assert_eq!(by_plan.vector("X"), by_loop.vector("X"));
    }
}
