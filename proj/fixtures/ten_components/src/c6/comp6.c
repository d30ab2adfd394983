extern bool FA;
extern bool FB;
extern bool FC;
extern bool FD;
extern bool FE;

int sig7 = 0;
extern int sig6;
extern int sig12;

int act6() {
    return 6;
}

int poll6() {
    if (sig6 > 0) {
        act6();
    }
    return 0;
}

int send7() {
    if (FA && !FB) {
        sig7 = sig7 + 1;
    }
    return 0;
}

int act12() {
    return 12;
}

int poll12() {
    if (sig12 > 0) {
        act12();
    }
    return 0;
}
