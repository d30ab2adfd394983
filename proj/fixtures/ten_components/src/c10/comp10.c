extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig11 = 0;
extern int sig10;

int act10() {
    return 10;
}

int poll10() {
    if (sig10 > 0) {
        act10();
    }
    return 0;
}

int send11() {
    if (FB || FC) {
        sig11 = sig11 + 1;
    }
    return 0;
}
