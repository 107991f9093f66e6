//! The infrastructure layer: parse an expression, differentiate it
//! symbolically, and propagate second-order jets through it — three views of
//! the same derivative information.

use psgeo::expr::Expr;
use psgeo::jet::eval_jet;
use std::collections::HashMap;

fn main() {
    let e = Expr::parse("sin(u1)*exp(u2/2) + u1^3").unwrap();
    println!("f        = {e}");

    let d1 = e.differentiate("u1").fold();
    let d2 = e.differentiate("u2").fold();
    println!("df/du1   = {d1}");
    println!("df/du2   = {d2}");

    let u = [0.8, -0.4];
    let bindings: HashMap<String, f64> =
        [("u1".to_string(), u[0]), ("u2".to_string(), u[1])].into();
    let jet = eval_jet(&e, u, &HashMap::new()).unwrap();
    println!("at u = ({}, {}):", u[0], u[1]);
    println!("  value      jet {:>20.15}  symbolic {:>20.15}", jet.val, e.eval_f64(&bindings).unwrap());
    println!("  d/du1      jet {:>20.15}  symbolic {:>20.15}", jet.d1, d1.eval_f64(&bindings).unwrap());
    println!("  d/du2      jet {:>20.15}  symbolic {:>20.15}", jet.d2, d2.eval_f64(&bindings).unwrap());
    let d11 = d1.differentiate("u1").fold();
    let d12 = d1.differentiate("u2").fold();
    println!("  d2/du1du1  jet {:>20.15}  symbolic {:>20.15}", jet.d11, d11.eval_f64(&bindings).unwrap());
    println!("  d2/du1du2  jet {:>20.15}  symbolic {:>20.15}", jet.d12, d12.eval_f64(&bindings).unwrap());
}
