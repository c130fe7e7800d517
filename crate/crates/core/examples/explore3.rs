// Scratch: exact values on the Fig.1 grid, X-space validation at N=20/30,
// and hypothesis probes for the Fig.3/Fig.4 discrepancy.
use nalgebra::{DMatrix, DVector};
use qtail::baselines::{imhof_cdf, spa_cdf, ImhofConfig, SpaConfig};
use qtail::canonical::{reduce_default, QuadFormProblem};
use qtail::db_to_linear;
use qtail::genmat::{constant_mean, toeplitz_power, ToeplitzPowerSpec};
use qtail::sampler::naive_mc;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

fn toeplitz(n: usize, base: f64) -> DMatrix<f64> {
    toeplitz_power(&ToeplitzPowerSpec { n, base }).unwrap()
}

fn family(n: usize, xi: f64, rho: f64, muv: f64, g: f64) -> QuadFormProblem {
    QuadFormProblem::new(constant_mean(n, muv), toeplitz(n, rho), toeplitz(n, xi), g)
}

fn exact(p: &QuadFormProblem) -> f64 {
    let cf = reduce_default(p).unwrap();
    imhof_cdf(&cf, p.gamma0, &ImhofConfig::default()).unwrap().raw_value
}

fn xspace_mc(mu: &DVector<f64>, sx: &DMatrix<f64>, s: &DMatrix<f64>, g: f64, m: usize) -> f64 {
    let chol = sx.clone().cholesky().unwrap();
    let l = chol.l();
    let n = mu.len();
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4242);
    let mut hits = 0usize;
    let mut z = DVector::zeros(n);
    for _ in 0..m {
        for i in 0..n {
            z[i] = StandardNormal.sample(&mut rng);
        }
        let x = mu + &l * &z;
        if (x.transpose() * s * &x)[(0, 0)] <= g {
            hits += 1;
        }
    }
    hits as f64 / m as f64
}

fn main() {
    println!("== Fig.1 paper-IS grid vs my exact imhof ==");
    let grids = [
        (10usize, vec![(-20.0, 1.9646e-12), (-15.0, 6.1648e-10), (-10.0, 1.6050e-7), (-5.0, 2.9640e-5), (0.0, 1.9e-3), (5.0, 3.33e-2), (10.0, 0.1925)]),
        (20, vec![(-20.0, 4.8228e-26), (-15.0, 4.4821e-21), (-10.0, 3.6450e-16), (-5.0, 2.0824e-11), (0.0, 3.6258e-7), (5.0, 6.7354e-4), (10.0, 0.0550)]),
        (30, vec![(-20.0, 9.6357e-41), (-15.0, 2.6672e-33), (-10.0, 6.7765e-26), (-5.0, 1.0989e-18), (0.0, 4.9436e-12), (5.0, 9.5018e-7), (10.0, 7.8013e-4)]),
    ];
    for (n, pts) in &grids {
        for (db, r) in pts {
            let p = family(*n, 0.4, 0.8, 1.0, db_to_linear(*db));
            let v = exact(&p);
            let cf = reduce_default(&p).unwrap();
            let sp = spa_cdf(&cf, p.gamma0, &SpaConfig::default()).map(|o| o.value).unwrap_or(f64::NAN);
            println!("N={n:>2} {db:>5}: exact {v:.5e}  paper {r:.4e}  ratio {:.3}  spa {sp:.3e}", r / v);
        }
    }

    println!("\n== X-space validation of reduce at N=20 and N=30 ==");
    for (n, db) in [(20usize, 7.0), (30, 9.0)] {
        let g = db_to_linear(db);
        let p = family(n, 0.4, 0.8, 1.0, g);
        let direct = xspace_mc(&p.mu, &p.sigma_x, &p.sigma, g, 4_000_000);
        let v = exact(&p);
        let se = (v * (1.0 - v) / 4e6f64).sqrt();
        println!("N={n} {db} dB: exact {v:.6e} direct-mc {direct:.6e} dev/se {:+.2}", (direct - v) / se);
    }

    println!("\n== Hypotheses for fig3/fig4 ==");
    // anchors: fig3 (xi=0.4 rho=0.8 mu=1): N=5:0.2882 N=10:0.0472 N=20:5.9554e-4 N=40:7.9750e-10
    // fig4 (xi=0.1 rho=0.5 mu=2): N=5:0.0174 N=10:1.3375e-4 N=20:3.0066e-10
    let anchors3 = [(5usize, 0.2882), (10, 0.0472), (20, 5.9554e-4), (40, 7.9750e-10)];
    let anchors4 = [(5usize, 0.0174), (10, 1.3375e-4), (20, 3.0066e-10)];

    // (h1) gamma linear = 5 (read "5 dB" as 5)
    println!("-- h1: gamma0 = 5.0 linear (fig3) --");
    for (n, r) in &anchors3 {
        let v = exact(&family(*n, 0.4, 0.8, 1.0, 5.0));
        println!("  N={n}: {v:.5e} paper {r:.4e} ratio {:.3}", r / v);
    }
    // (h2) alpha sign/pairing irrelevant; try mu applied with Sigma^{-1/2} of swapped? skip.
    // (h2) threshold on half the form? gamma*2
    println!("-- h2: gamma0 = 2*10^(0.5) (fig3) --");
    for (n, r) in &anchors3 {
        let v = exact(&family(*n, 0.4, 0.8, 1.0, 2.0 * db_to_linear(5.0)));
        println!("  N={n}: {v:.5e} paper {r:.4e} ratio {:.3}", r / v);
    }
    // (h3) X centered: alpha = 0 (they maybe evaluated central form)
    println!("-- h3: mu = 0 (fig3) --");
    for (n, r) in &anchors3 {
        let v = exact(&family(*n, 0.4, 0.8, 0.0, db_to_linear(5.0)));
        println!("  N={n}: {v:.5e} paper {r:.4e} ratio {:.3}", r / v);
    }
    // (h4) fig4 with mu=sqrt(2)? (mu_i=2 maybe means mu'Sx^{-1}mu=2?)
    println!("-- h4: fig4 family as stated --");
    for (n, r) in &anchors4 {
        let v = exact(&family(*n, 0.1, 0.5, 2.0, db_to_linear(5.0)));
        println!("  N={n}: {v:.5e} paper {r:.4e} ratio {:.3}", r / v);
    }
}
