pub struct Demo {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: &'static str,
}

pub const DEMOS: &[Demo] = &[
    Demo {
        name: "abc",
        summary: "ABC Beltrami flow, n = 32, nu = 0.1, T = 0.5",
        config: include_str!("../demos/abc.json"),
    },
    Demo {
        name: "taylor_green",
        summary: "Taylor-Green vortex, n = 32, nu = 0.1, T = 0.1",
        config: include_str!("../demos/taylor_green.json"),
    },
    Demo {
        name: "random",
        summary: "seeded random band-limited flow with a uniform potential part, n = 16",
        config: include_str!("../demos/random.json"),
    },
];

pub const NAMES: [&str; 3] = ["abc", "taylor_green", "random"];

pub fn find(name: &str) -> Option<&'static Demo> {
    DEMOS.iter().find(|d| d.name == name)
}
