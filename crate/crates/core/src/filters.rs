/// Daubechies low-pass filters `h_0 .. h_{2N-1}` for orders 1..=10, normalized
/// to `sum h_k = sqrt(2)`, 15 significant digits. `phi` is supported on
/// `[0, 2N - 1]`.
pub(crate) const DAUBECHIES: [&[f64]; 10] = [
    &[
        7.07106781186548e-01,
        7.07106781186548e-01,
    ],
    &[
        4.82962913144534e-01,
        8.36516303737808e-01,
        2.24143868042013e-01,
        -1.29409522551260e-01,
    ],
    &[
        3.32670552950083e-01,
        8.06891509311093e-01,
        4.59877502118492e-01,
        -1.35011020010255e-01,
        -8.54412738820267e-02,
        3.52262918857095e-02,
    ],
    &[
        2.30377813308897e-01,
        7.14846570552916e-01,
        6.30880767929859e-01,
        -2.79837694168599e-02,
        -1.87034811719093e-01,
        3.08413818355608e-02,
        3.28830116668852e-02,
        -1.05974017850690e-02,
    ],
    &[
        1.60102397974193e-01,
        6.03829269797190e-01,
        7.24308528437773e-01,
        1.38428145901321e-01,
        -2.42294887066382e-01,
        -3.22448695846384e-02,
        7.75714938400457e-02,
        -6.24149021279827e-03,
        -1.25807519990820e-02,
        3.33572528547377e-03,
    ],
    &[
        1.11540743350109e-01,
        4.94623890398453e-01,
        7.51133908021095e-01,
        3.15250351709198e-01,
        -2.26264693965440e-01,
        -1.29766867567262e-01,
        9.75016055873230e-02,
        2.75228655303057e-02,
        -3.15820393174860e-02,
        5.53842201161496e-04,
        4.77725751094551e-03,
        -1.07730108530848e-03,
    ],
    &[
        7.78520540850092e-02,
        3.96539319481917e-01,
        7.29132090846235e-01,
        4.69782287405193e-01,
        -1.43906003928565e-01,
        -2.24036184993875e-01,
        7.13092192668303e-02,
        8.06126091510831e-02,
        -3.80299369350144e-02,
        -1.65745416306669e-02,
        1.25509985560998e-02,
        4.29577972921367e-04,
        -1.80164070404749e-03,
        3.53713799974520e-04,
    ],
    &[
        5.44158422431040e-02,
        3.12871590914300e-01,
        6.75630736297290e-01,
        5.85354683654207e-01,
        -1.58291052563493e-02,
        -2.84015542961547e-01,
        4.72484573913283e-04,
        1.28747426620478e-01,
        -1.73693010018075e-02,
        -4.40882539307948e-02,
        1.39810279173983e-02,
        8.74609404740578e-03,
        -4.87035299345157e-03,
        -3.91740373376947e-04,
        6.75449406450569e-04,
        -1.17476784124770e-04,
    ],
    &[
        3.80779473638783e-02,
        2.43834674612590e-01,
        6.04823123690111e-01,
        6.57288078051301e-01,
        1.33197385825008e-01,
        -2.93273783279175e-01,
        -9.68407832229765e-02,
        1.48540749338106e-01,
        3.07256814793334e-02,
        -6.76328290613300e-02,
        2.50947114831452e-04,
        2.23616621236791e-02,
        -4.72320475775140e-03,
        -4.28150368246343e-03,
        1.84764688305623e-03,
        2.30385763523196e-04,
        -2.51963188942710e-04,
        3.93473203162716e-05,
    ],
    &[
        2.66700579005556e-02,
        1.88176800077691e-01,
        5.27201188931726e-01,
        6.88459039453604e-01,
        2.81172343660577e-01,
        -2.49846424327315e-01,
        -1.95946274377377e-01,
        1.27369340335793e-01,
        9.30573646035724e-02,
        -7.13941471663971e-02,
        -2.94575368218758e-02,
        3.32126740593410e-02,
        3.60655356695617e-03,
        -1.07331754833306e-02,
        1.39535174705290e-03,
        1.99240529518506e-03,
        -6.85856694959712e-04,
        -1.16466855129285e-04,
        9.35886703200696e-05,
        -1.32642028945212e-05,
    ],
];
