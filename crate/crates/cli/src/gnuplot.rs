//! Minimal gnuplot scripts for the CSV outputs. Run from the output directory.

pub fn sigma_sweep(csv: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale xy\n\
         set xlabel 'sigma'\n\
         set ylabel 'mean energy shift'\n\
         plot '{csv}' using 1:2:3 with yerrorbars title 'Monte Carlo', \\\n     '{csv}' using 1:4 with linespoints title 'exact channel'\n\
         pause -1\n"
    )
}

pub fn param_sweep(csv: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set xlabel 'delta'\n\
         set ylabel 'energy'\n\
         plot for [k in system(\"tail -n +2 {csv} | cut -d, -f1 | uniq\")] \\\n     '< grep ^'.k.', {csv}' using 3:4 with lines title k\n\
         pause -1\n"
    )
}

pub fn time_scan(csv: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set xlabel 't_max'\n\
         set ylabel 'p'\n\
         set cblabel 'E*'\n\
         set view map\n\
         splot '{csv}' using 2:1:3 with points pointtype 5 palette notitle\n\
         pause -1\n"
    )
}
